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
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>

#include "manet/messages.hpp"

namespace manet {

/// floor(mt / mr); `initial_level` when nothing has been received yet.
std::int32_t fidelity_from_ratio(std::uint64_t mt, std::uint64_t mr,
                                 std::int32_t initial_level);

/// Forwarding is allowed only when both levels strictly exceed the threshold.
bool fidelity_gate(std::int32_t self_level, std::int32_t next_level,
                   std::int32_t threshold);

/// Per-node trust bookkeeping. Levels are ACK-driven counters; nodes never
/// seen start at `initial_level`.
class FidelityState {
 public:
  FidelityState() = default;
  FidelityState(NodeId self, std::int32_t initial_level, std::int32_t threshold)
      : self_(self), initial_level_(initial_level), threshold_(threshold) {}

  std::int32_t level(NodeId node) const;
  bool known(NodeId node) const { return level_.contains(node); }

  /// Adds `delta` to a node observed directly; result floored at 0.
  /// Returns the new level.
  std::int32_t adjust(NodeId node, std::int32_t delta);

  /// Adopts a neighbour's report for nodes we have not observed ourselves,
  /// keeping the minimum across reports. Entries about ourselves are
  /// ignored. Returns the nodes whose level changed.
  std::vector<NodeId> merge(const FidelityExchange& report);

  /// Drops every trace of `node` (level, tallies, observation flag).
  void forget(NodeId node);

  void count_received(NodeId node) { ++mr_[node]; }
  void count_forwarded(NodeId node) { ++mt_[node]; }
  std::uint64_t mt(NodeId node) const;
  std::uint64_t mr(NodeId node) const;
  std::int32_t ratio_level(NodeId node) const {
    return fidelity_from_ratio(mt(node), mr(node), initial_level_);
  }

  bool observed(NodeId node) const { return observed_.contains(node); }
  FidelityExchange snapshot() const;

  std::int32_t threshold() const { return threshold_; }
  std::int32_t initial_level() const { return initial_level_; }
  NodeId self() const { return self_; }
  const std::map<NodeId, std::int32_t>& levels() const { return level_; }

  // Test hook: pin a level without marking the node observed.
  void set_level(NodeId node, std::int32_t level) { level_[node] = level; }

 private:
  NodeId self_ = 0;
  std::int32_t initial_level_ = 10;
  std::int32_t threshold_ = 5;
  std::map<NodeId, std::int32_t> level_;
  std::map<NodeId, std::uint64_t> mt_;
  std::map<NodeId, std::uint64_t> mr_;
  std::set<NodeId> observed_;
};

}  // namespace manet
