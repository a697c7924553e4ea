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

#include "manet/rng.hpp"

namespace manet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);

struct MobilityParams {
  double area_x = 500.0;
  double area_y = 500.0;
  double speed_min = 1.0;
  double speed_max = 20.0;
  double pause_time = 10.0;
};

/// Random-waypoint state of one node. A leg is stored by its origin and
/// start time so the position is an exact function of time, independent of
/// how often the state is sampled.
struct MobilityState {
  Vec2 position;
  Vec2 waypoint;
  double speed = 0.0;
  double paused_until = 0.0;
  bool moving = false;
  Vec2 leg_origin;
  double leg_start = 0.0;
  double arrival_at = 0.0;
  double updated_at = 0.0;
};

/// A node resting at `position` whose first leg starts at time 0.
MobilityState rwp_place(Vec2 position);

/// Advances `m` to `now`. When a pause has expired a new waypoint and speed
/// are drawn; reaching a waypoint starts a pause of exactly pause_time.
MobilityState rwp_step(MobilityState m, double now, const MobilityParams& p,
                       Rng& rng);

}  // namespace manet
