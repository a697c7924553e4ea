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
#include <memory>
#include <optional>
#include <queue>
#include <variant>
#include <vector>

#include "manet/crypto.hpp"
#include "manet/metrics.hpp"
#include "manet/mobility.hpp"
#include "manet/radio.hpp"
#include "manet/router.hpp"
#include "manet/scenario.hpp"
#include "manet/trace.hpp"

namespace manet {

struct RunOutput {
  MetricsSeries series;
  RunSummary summary;
  ResolvedScenario resolved;
  std::uint64_t events_processed = 0;
};

/// One sequential run of a scenario. Every random draw comes from a
/// substream keyed by the scenario seed, so a run is a pure function of its
/// configuration.
class Simulator {
 public:
  /// `trace` receives every event as it happens and may be null.
  explicit Simulator(const ScenarioConfig& cfg, TraceSink* trace = nullptr);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Processes all events up to the configured end time. Call once.
  RunOutput run();

  const ResolvedScenario& resolved() const { return resolved_; }
  const Router& router(NodeId id) const { return *routers_.at(id); }
  std::size_t node_count() const { return routers_.size(); }
  /// Position of `id` at `now`; `now` must not precede earlier queries.
  Vec2 position(NodeId id, double now);

 private:
  struct Arrival {
    NodeId to = 0;
    NodeId from = 0;
    std::shared_ptr<const RoutingMessage> msg;
  };
  struct TimerFire {
    NodeId node = 0;
    Timer timer;
  };
  struct TrafficEmit {
    std::uint32_t flow = 0;
    std::uint32_t packet_seq = 0;
  };
  struct Event {
    double fire_at = 0.0;
    std::uint64_t seq = 0;
    std::variant<Arrival, TimerFire, TrafficEmit> payload;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.fire_at != b.fire_at ? a.fire_at > b.fire_at : a.seq > b.seq;
    }
  };

  void schedule(double at, std::variant<Arrival, TimerFire, TrafficEmit> payload);
  void emit(const TraceEvent& e);
  void drain(NodeId node, Effects& fx);
  void transmit(NodeId from, Effects::Send send, double now);
  void handle(const Arrival& a, double now);
  void handle(const TimerFire& t, double now);
  void handle(const TrafficEmit& t, double now);

  ScenarioConfig cfg_;
  ResolvedScenario resolved_;
  TraceSink* trace_;
  MetricsCollector collector_;
  std::unique_ptr<CryptoSuite> crypto_;
  std::vector<std::unique_ptr<Router>> routers_;
  std::vector<MobilityState> mobility_;
  std::vector<Rng> mobility_rngs_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  std::uint64_t data_in_air_ = 0;  // data arrivals still queued
  bool ran_ = false;
};

/// Convenience wrapper: build, run, return.
RunOutput simulate(const ScenarioConfig& cfg, TraceSink* trace = nullptr);

}  // namespace manet
