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

#include <span>
#include <vector>

#include "manet/messages.hpp"
#include "manet/mobility.hpp"

namespace manet {

/// Unit-disk radio on an idealized shared medium (no collisions).
struct RadioModel {
  double range = 250.0;         // m
  double bandwidth = 2.0e6;     // bit/s
  double per_hop_proc_delay = 0.001;  // s
};

/// Nodes within range of u (closed disk), in ascending id order.
std::vector<NodeId> neighbors(std::span<const Vec2> positions, NodeId u,
                              const RadioModel& radio);

bool in_range(Vec2 a, Vec2 b, const RadioModel& radio);

/// Serialization plus processing delay of one hop.
double hop_delay(std::size_t bytes, const RadioModel& radio);

}  // namespace manet
