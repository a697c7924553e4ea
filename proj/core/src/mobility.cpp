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
#include "manet/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace manet {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

MobilityState rwp_place(Vec2 position) {
  MobilityState m;
  m.position = position;
  m.waypoint = position;
  m.leg_origin = position;
  return m;
}

MobilityState rwp_step(MobilityState m, double now, const MobilityParams& p,
                       Rng& rng) {
  while (true) {
    if (!m.moving) {
      if (m.paused_until > now) break;
      m.leg_origin = m.position;
      m.leg_start = m.paused_until;
      m.waypoint = {rng.uniform(0.0, p.area_x), rng.uniform(0.0, p.area_y)};
      m.speed = rng.uniform(p.speed_min, p.speed_max);
      const double d = distance(m.leg_origin, m.waypoint);
      if (d == 0.0) {
        m.arrival_at = m.leg_start;
      } else if (m.speed <= 0.0) {
        m.arrival_at = kInfinity;
      } else {
        m.arrival_at = m.leg_start + d / m.speed;
      }
      m.moving = true;
    }
    if (m.arrival_at <= now) {
      m.position = m.waypoint;
      m.moving = false;
      m.paused_until = m.arrival_at + p.pause_time;
      continue;
    }
    const double d = distance(m.leg_origin, m.waypoint);
    const double frac = std::clamp((now - m.leg_start) * m.speed / d, 0.0, 1.0);
    m.position = {
        std::clamp(m.leg_origin.x + (m.waypoint.x - m.leg_origin.x) * frac,
                   0.0, p.area_x),
        std::clamp(m.leg_origin.y + (m.waypoint.y - m.leg_origin.y) * frac,
                   0.0, p.area_y)};
    break;
  }
  m.updated_at = std::max(m.updated_at, now);
  return m;
}

}  // namespace manet
