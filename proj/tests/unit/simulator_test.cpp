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


#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "manet/simulator.hpp"

namespace manet {
namespace {

std::vector<TraceEvent> run_events(const ScenarioConfig& cfg, RunOutput* out = nullptr) {
  VectorTraceSink sink;
  RunOutput o = simulate(cfg, &sink);
  if (out != nullptr) *out = std::move(o);
  return std::move(sink.events);
}

std::string trace_text(const ScenarioConfig& cfg) {
  std::ostringstream out;
  NdjsonTraceWriter w(out);
  simulate(cfg, &w);
  return out.str();
}

TEST(Simulator, NoFlowsMeansNoData) {
  ScenarioConfig cfg;
  cfg.traffic.flow_count = 0;
  cfg.sim_time = 10;
  const RunOutput out = simulate(cfg);
  EXPECT_EQ(out.summary.generated, 0u);
  EXPECT_EQ(out.summary.delivered, 0u);
  EXPECT_EQ(out.summary.delivery_ratio(), 0.0);
  for (const auto& r : out.series.rows) EXPECT_EQ(r.throughput_bps, 0.0);
}

TEST(Simulator, SameSeedSameTrace) {
  for (auto proto : {EngineKind::kAodv, EngineKind::kSaodv, EngineKind::kPcAodvBh}) {
    ScenarioConfig cfg;
    cfg.protocol = proto;
    cfg.attacker_count = 2;
    cfg.sim_time = 20;
    EXPECT_EQ(trace_text(cfg), trace_text(cfg)) << engine_kind_name(proto);
  }
  ScenarioConfig a, b;
  a.sim_time = b.sim_time = 20;
  b.seed = 2;
  EXPECT_NE(trace_text(a), trace_text(b));
}

TEST(Simulator, LineDeliversEverythingOverTwoHops) {
  for (auto proto : {EngineKind::kAodv, EngineKind::kSaodv, EngineKind::kPcAodvBh}) {
    ScenarioConfig cfg = testing::line_scenario(proto);
    Simulator sim(cfg);
    const RunOutput out = sim.run();
    EXPECT_GT(out.summary.generated, 0u);
    EXPECT_EQ(out.summary.delivered, out.summary.generated) << engine_kind_name(proto);
    const auto route = sim.router(0).state().routing_table.find(2);
    ASSERT_NE(route, nullptr);
    EXPECT_EQ(route->hop_count, 2u);
    EXPECT_EQ(route->next_hop, 1u);
  }
}

TEST(Simulator, BroadcastReachesEveryNeighbour) {
  ScenarioConfig cfg = testing::static_scenario(
      {{250, 250}, {350, 250}, {250, 350}, {150, 250}, {0, 0}}, {{0, 4, 1.0}});
  cfg.sim_time = 1.5;
  const auto events = run_events(cfg);
  std::set<NodeId> receivers;
  for (const auto& e : events) {
    if (e.kind == EventKind::kReceive && e.key == "q:0:0" && e.peer == 0) {
      receivers.insert(e.node);
    }
  }
  EXPECT_EQ(receivers, (std::set<NodeId>{1, 2, 3}));
}

TEST(Simulator, HopDelayMatchesRadioModel) {
  ScenarioConfig cfg = testing::line_scenario();
  const auto events = run_events(cfg);
  const auto gen = std::find_if(events.begin(), events.end(), [](const TraceEvent& e) {
    return e.kind == EventKind::kGenerate && e.key == "d:0:0:40";
  });
  const auto del = std::find_if(events.begin(), events.end(), [](const TraceEvent& e) {
    return e.kind == EventKind::kDeliver && e.key == "d:0:0:40";
  });
  ASSERT_NE(gen, events.end());
  ASSERT_NE(del, events.end());
  const double per_hop = hop_delay(wire_size(DataPacket{}), cfg.radio);
  EXPECT_NEAR(del->time - gen->time, 2 * per_hop, 1e-12);
  EXPECT_NEAR(del->latency, 2 * per_hop, 1e-12);
}

TEST(Simulator, EventsAreCausal) {
  ScenarioConfig cfg;
  cfg.attacker_count = 1;
  const auto events = run_events(cfg);
  for (std::size_t i = 1; i < events.size(); ++i) {
    ASSERT_LE(events[i - 1].time, events[i].time) << i;
  }
  std::map<std::string, double> generated;
  for (const auto& e : events) {
    if (e.kind == EventKind::kGenerate) generated[e.key] = e.time;
    if (e.kind == EventKind::kDeliver) {
      ASSERT_TRUE(generated.contains(e.key));
      EXPECT_GT(e.time, generated[e.key]);
    }
  }
}

TEST(Simulator, MobilityBreaksLinksAndPacketsStayAccounted) {
  std::size_t link_breaks = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    RunOutput out;
    for (const auto& e : run_events(cfg, &out)) {
      if (e.kind == EventKind::kDrop && (e.reason == "link_break" || e.detail == "link_break")) {
        ++link_breaks;
      }
    }
    EXPECT_TRUE(conservation_holds(out.summary)) << seed;
  }
  EXPECT_GT(link_breaks, 0u);
}

TEST(Simulator, PositionsStayInsideArea) {
  ScenarioConfig cfg;
  Simulator sim(cfg);
  for (double t = 0; t <= 60; t += 0.5) {
    for (NodeId n = 0; n < sim.node_count(); ++n) {
      const Vec2 p = sim.position(n, t);
      ASSERT_GE(p.x, 0);
      ASSERT_LE(p.x, cfg.mobility.area_x);
      ASSERT_GE(p.y, 0);
      ASSERT_LE(p.y, cfg.mobility.area_y);
    }
  }
}

// --- trace properties ----------------------------------------------------------

TEST(TraceProperties, BlackHolesOnlyAnswerRequests) {
  for (auto proto : {EngineKind::kAodv, EngineKind::kSaodv, EngineKind::kPcAodvBh}) {
    ScenarioConfig cfg;
    cfg.protocol = proto;
    cfg.attacker_count = 5;
    RunOutput out;
    const auto events = run_events(cfg, &out);
    const auto& bad = out.resolved.attackers;
    for (const auto& e : events) {
      if (!std::binary_search(bad.begin(), bad.end(), e.node)) continue;
      if (e.kind == EventKind::kSend) {
        EXPECT_EQ(e.detail, "RREP") << e.key;
        EXPECT_NE(e.peer, kBroadcast);
      }
      EXPECT_NE(e.kind, EventKind::kDeliver);
      EXPECT_NE(e.kind, EventKind::kRouteUpdate);
      EXPECT_NE(e.kind, EventKind::kGenerate);
    }
  }
}

// Follows next hops of currently valid routes every time a route changes.
class LoopChecker : public TraceSink {
 public:
  void attach(Simulator* sim) { sim_ = sim; }
  void record(const TraceEvent& e) override {
    if (e.kind != EventKind::kRouteUpdate || e.reason == "down") return;
    ++checks;
    const NodeId dst = static_cast<NodeId>(std::stoul(e.key.substr(2)));
    std::set<NodeId> visited;
    NodeId at = e.node;
    while (at != dst) {
      if (!visited.insert(at).second) {
        ++loops;
        return;
      }
      const auto route = sim_->router(at).state().routing_table.lookup(dst, e.time);
      if (!route) return;
      at = route->next_hop;
    }
  }
  Simulator* sim_ = nullptr;
  std::size_t checks = 0;
  std::size_t loops = 0;
};

TEST(TraceProperties, ValidRoutesNeverFormLoops) {
  for (auto proto : {EngineKind::kAodv, EngineKind::kSaodv, EngineKind::kPcAodvBh}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      ScenarioConfig cfg;
      cfg.protocol = proto;
      cfg.seed = seed;
      LoopChecker checker;
      Simulator sim(cfg, &checker);
      checker.attach(&sim);
      sim.run();
      EXPECT_GT(checker.checks, 0u);
      EXPECT_EQ(checker.loops, 0u) << engine_kind_name(proto) << " seed " << seed;
    }
  }
}

TEST(TraceProperties, EliminatedNodesStayExcluded) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ScenarioConfig cfg;
    cfg.protocol = EngineKind::kPcAodvBh;
    cfg.attacker_count = 2;
    cfg.seed = seed;
    VectorTraceSink sink;
    Simulator traced(cfg, &sink);
    traced.run();
    std::map<NodeId, std::set<NodeId>> excluded;
    for (const auto& e : sink.events) {
      if (e.kind == EventKind::kElimination) {
        excluded[e.node].insert(e.peer);
      } else if (e.kind == EventKind::kRouteUpdate && e.reason != "down") {
        EXPECT_FALSE(excluded[e.node].contains(e.next_hop))
            << "node " << e.node << " routes via eliminated " << e.next_hop;
      } else if (e.kind == EventKind::kFidelityUpdate) {
        EXPECT_FALSE(excluded[e.node].contains(e.peer));
      }
    }
    for (const auto& [node, set] : excluded) {
      for (NodeId x : set) EXPECT_TRUE(traced.router(node).state().blacklist.contains(x));
    }
  }
}

TEST(TraceProperties, HonestSecuredRunsHaveNoVerificationFailures) {
  for (auto proto : {EngineKind::kSaodv, EngineKind::kPcAodvBh}) {
    ScenarioConfig cfg;
    cfg.protocol = proto;
    cfg.attacker_count = 2;
    Simulator sim(cfg);
    sim.run();
    for (NodeId n = 0; n < sim.node_count(); ++n) {
      EXPECT_EQ(sim.router(n).state().verify_failures, 0u);
    }
  }
}

TEST(TraceProperties, FidelityLevelsStayNonNegative) {
  ScenarioConfig cfg;
  cfg.protocol = EngineKind::kPcAodvBh;
  cfg.attacker_count = 5;
  for (const auto& e : run_events(cfg)) {
    if (e.kind == EventKind::kFidelityUpdate) {
      ASSERT_GE(e.value, 0);
    }
  }
}

}  // namespace
}  // namespace manet
