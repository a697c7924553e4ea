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
#include "manet/radio.hpp"

namespace manet {

bool in_range(Vec2 a, Vec2 b, const RadioModel& radio) {
  return distance(a, b) <= radio.range;
}

std::vector<NodeId> neighbors(std::span<const Vec2> positions, NodeId u,
                              const RadioModel& radio) {
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < positions.size(); ++v) {
    if (v == u) continue;
    if (in_range(positions[u], positions[v], radio)) {
      out.push_back(static_cast<NodeId>(v));
    }
  }
  return out;
}

double hop_delay(std::size_t bytes, const RadioModel& radio) {
  return static_cast<double>(bytes) * 8.0 / radio.bandwidth +
         radio.per_hop_proc_delay;
}

}  // namespace manet
