// Copyright 2026 The manetsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "manet/fidelity.hpp"

#include <algorithm>

namespace manet {

std::int32_t fidelity_from_ratio(std::uint64_t mt, std::uint64_t mr,
                                 std::int32_t initial_level) {
  if (mr == 0) return initial_level;
  return static_cast<std::int32_t>(mt / mr);
}

bool fidelity_gate(std::int32_t self_level, std::int32_t next_level,
                   std::int32_t threshold) {
  return self_level > threshold && next_level > threshold;
}

std::int32_t FidelityState::level(NodeId node) const {
  auto it = level_.find(node);
  return it == level_.end() ? initial_level_ : it->second;
}

std::int32_t FidelityState::adjust(NodeId node, std::int32_t delta) {
  const std::int32_t next = std::max(0, level(node) + delta);
  level_[node] = next;
  observed_.insert(node);
  return next;
}

std::vector<NodeId> FidelityState::merge(const FidelityExchange& report) {
  std::vector<NodeId> changed;
  for (const auto& [node, reported] : report.entries) {
    if (node == self_ || node == report.sender || observed_.contains(node)) {
      continue;
    }
    auto it = level_.find(node);
    if (it == level_.end()) {
      level_[node] = reported;
      changed.push_back(node);
    } else if (reported < it->second) {
      it->second = reported;
      changed.push_back(node);
    }
  }
  return changed;
}

void FidelityState::forget(NodeId node) {
  level_.erase(node);
  mt_.erase(node);
  mr_.erase(node);
  observed_.erase(node);
}

std::uint64_t FidelityState::mt(NodeId node) const {
  auto it = mt_.find(node);
  return it == mt_.end() ? 0 : it->second;
}

std::uint64_t FidelityState::mr(NodeId node) const {
  auto it = mr_.find(node);
  return it == mr_.end() ? 0 : it->second;
}

FidelityExchange FidelityState::snapshot() const {
  FidelityExchange fx;
  fx.sender = self_;
  for (const auto& [node, level] : level_) {
    if (node != self_) fx.entries[node] = level;
  }
  return fx;
}

}  // namespace manet
