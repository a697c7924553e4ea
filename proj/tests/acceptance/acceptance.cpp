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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits with status 3 if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "manet/crypto.hpp"
#include "manet/experiment.hpp"
#include "manet/router.hpp"
#include "manet/simulator.hpp"

namespace manet {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// --- hash chain and signature soundness ----------------------------------------

// A signed message forwarded k times by honest nodes, with the chain advanced
// by the independent SHA-256 oracle rather than chain_step.
RoutingMessage honest_forward(std::mt19937_64& gen, const CryptoSuite& suite,
                              std::uint32_t* k_out) {
  const std::uint32_t max_hops = 1 + gen() % 40;
  const std::uint32_t k = gen() % (max_hops + 1);
  const NodeId signer = gen() % 16;
  const Bytes seed = testing::random_bytes(gen, 32);
  SecurityExtension ext;
  ext.hash = seed;
  ext.top_hash = testing::sha256_fold(seed, max_hops);
  ext.max_hop_count = max_hops;
  ext.hash = testing::sha256_fold(seed, k);

  RoutingMessage msg;
  if (gen() % 2 == 0) {
    Rreq q{signer, testing::random_u32(gen), testing::random_u32(gen),
           static_cast<NodeId>(gen() % 16), testing::random_u32(gen), 0,
           static_cast<std::uint32_t>(gen() % 30), ext};
    q.security = sign(q, signer, suite.keys, SignatureKind::kSingle);
    q.security->hash = ext.hash;
    q.hop_count = k;
    msg = q;
  } else {
    Rrep p{static_cast<NodeId>(gen() % 16), signer, testing::random_u32(gen), 0,
           1.0 + static_cast<double>(gen() % 1000) / 10.0, kNoNode, ext};
    p.security = sign(p, signer, suite.keys, SignatureKind::kSingle);
    p.security->hash = ext.hash;
    p.hop_count = k;
    p.sender_next_hop = static_cast<NodeId>(gen() % 16);
    msg = p;
  }
  *k_out = k;
  return msg;
}

bool fully_verifies(const RoutingMessage& msg, const CryptoSuite& suite) {
  const SecurityExtension& ext = **security_of(msg);
  const std::uint32_t hops = std::visit(
      [](const auto& m) -> std::uint32_t {
        if constexpr (requires { m.hop_count; }) {
          return m.hop_count;
        } else {
          return 0;
        }
      },
      msg);
  return verify(msg, ext, suite.keys) &&
         chain_verify(suite.hash, ext.hash, ext.top_hash, hops, ext.max_hop_count);
}

void flip_random_field(RoutingMessage& msg, std::mt19937_64& gen) {
  if (auto* q = std::get_if<Rreq>(&msg)) {
    switch (gen() % 7) {
      case 0: q->src ^= 1u << (gen() % 32); break;
      case 1: q->src_seq ^= 1u << (gen() % 32); break;
      case 2: q->broadcast_id ^= 1u << (gen() % 32); break;
      case 3: q->dst ^= 1u << (gen() % 32); break;
      case 4: q->dst_seq ^= 1u << (gen() % 32); break;
      case 5: q->security->top_hash[gen() % 32] ^= 1u << (gen() % 8); break;
      default: q->security->max_hop_count ^= 1u << (gen() % 32); break;
    }
  } else {
    auto& p = std::get<Rrep>(msg);
    switch (gen() % 6) {
      case 0: p.originator ^= 1u << (gen() % 32); break;
      case 1: p.dst ^= 1u << (gen() % 32); break;
      case 2: p.dst_seq ^= 1u << (gen() % 32); break;
      case 3: p.lifetime += 1.0 + static_cast<double>(gen() % 100); break;
      case 4: p.security->top_hash[gen() % 32] ^= 1u << (gen() % 8); break;
      default: p.security->max_hop_count ^= 1u << (gen() % 32); break;
    }
  }
}

void decrement_hop_count(RoutingMessage& msg) {
  std::visit(
      [](auto& m) {
        if constexpr (requires { m.hop_count; }) --m.hop_count;
      },
      msg);
}

Verdict crypto_soundness() {
  const auto start = Clock::now();
  const CryptoSuite suite = testing::make_suite(16, SignatureScheme::kEd25519, 11);
  std::mt19937_64 gen(2026);
  int valid_ok = 0, tamper_rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    std::uint32_t k = 0;
    if (fully_verifies(honest_forward(gen, suite, &k), suite)) ++valid_ok;
  }
  for (int i = 0; i < 1000; ++i) {
    std::uint32_t k = 0;
    RoutingMessage msg = honest_forward(gen, suite, &k);
    while (k == 0) msg = honest_forward(gen, suite, &k);
    if (i % 2 == 0) {
      decrement_hop_count(msg);
    } else {
      flip_random_field(msg, gen);
    }
    if (!fully_verifies(msg, suite)) ++tamper_rejected;
  }
  const double elapsed = seconds_since(start);
  return {valid_ok == 1000 && tamper_rejected == 1000 && elapsed < 10.0,
          format("%d/1000 honest verify, %d/1000 tampered rejected, %.2f s", valid_ok,
                 tamper_rejected, elapsed)};
}

// --- route update rule ----------------------------------------------------------

// Replays the update conditions on a plain table: install when absent; when the
// current entry is no longer usable, install unless the offer is older; else
// install when strictly fresher, or equally fresh and strictly shorter.
struct OracleEntry {
  SeqNum seq;
  std::uint32_t hops;
  NodeId next;
  double expires;
};

void oracle_offer(std::map<NodeId, OracleEntry>& table, NodeId dst, const OracleEntry& c,
                  double now) {
  auto it = table.find(dst);
  bool take = it == table.end();
  if (!take) {
    const OracleEntry& cur = it->second;
    if (cur.expires <= now) {
      take = c.seq >= cur.seq;
    } else {
      take = c.seq > cur.seq || (c.seq == cur.seq && c.hops < cur.hops);
    }
  }
  if (take) table[dst] = c;
}

Verdict route_rule_oracle() {
  std::mt19937_64 gen(1);
  int divergences = 0;
  constexpr int kSequences = 10000;
  for (int s = 0; s < kSequences; ++s) {
    Router router(0, EngineKind::kAodv, ProtocolParams{}, nullptr, 1);
    std::map<NodeId, OracleEntry> oracle;
    double now = 0.0;
    const int length = 1 + static_cast<int>(gen() % 30);
    for (int i = 0; i < length; ++i) {
      now += static_cast<double>(gen() % 100) / 100.0;
      Rrep rep;
      rep.originator = 0;
      rep.dst = 1 + gen() % 3;
      rep.dst_seq = gen() % 6;
      rep.hop_count = gen() % 5;
      rep.lifetime = 0.25 + static_cast<double>(gen() % 20) / 4.0;
      const NodeId from = 4 + gen() % 4;
      Effects fx(now);
      router.recv_rrep(rep, from, fx);
      oracle_offer(oracle, rep.dst,
                   {rep.dst_seq, rep.hop_count + 1, from, now + rep.lifetime}, now);
    }
    for (NodeId dst = 1; dst <= 3; ++dst) {
      const RouteEntry* e = router.state().routing_table.find(dst);
      auto it = oracle.find(dst);
      const bool same =
          (e == nullptr && it == oracle.end()) ||
          (e != nullptr && it != oracle.end() && e->dst_seq == it->second.seq &&
           e->hop_count == it->second.hops && e->next_hop == it->second.next &&
           e->expires_at == it->second.expires);
      if (!same) ++divergences;
    }
  }
  return {divergences == 0,
          format("%d sequences, %d divergent entries", kSequences, divergences)};
}

// --- static sanity and determinism ---------------------------------------------

Verdict static_line() {
  Simulator sim(testing::line_scenario(EngineKind::kAodv));
  const RunOutput out = sim.run();
  const RouteEntry* route = sim.router(0).state().routing_table.find(2);
  const std::uint32_t hops = route != nullptr ? route->hop_count : 0;
  return {out.summary.generated > 0 && out.summary.delivery_ratio() == 1.0 && hops == 2,
          format("delivered %llu/%llu, ratio %.17g, hop_count %u",
                 static_cast<unsigned long long>(out.summary.delivered),
                 static_cast<unsigned long long>(out.summary.generated),
                 out.summary.delivery_ratio(), hops)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "manetsim_acceptance_determinism";
  int runs = 0, identical = 0;
  for (auto proto : {EngineKind::kAodv, EngineKind::kSaodv, EngineKind::kPcAodvBh}) {
    for (std::uint64_t seed : {1ull, 7ull}) {
      ScenarioConfig cfg;
      cfg.protocol = proto;
      cfg.seed = seed;
      cfg.attacker_count = 2;
      fs::remove_all(root);
      run_single(cfg, root / "a");
      run_single(cfg, root / "b");
      ++runs;
      if (slurp(root / "a" / "trace.ndjson") == slurp(root / "b" / "trace.ndjson") &&
          slurp(root / "a" / "metrics.csv") == slurp(root / "b" / "metrics.csv") &&
          !slurp(root / "a" / "trace.ndjson").empty()) {
        ++identical;
      }
    }
  }
  fs::remove_all(root);
  return {identical == runs,
          format("%d/%d repeated runs byte-identical (trace and metrics.csv)", identical,
                 runs)};
}

// --- grid-level criteria ---------------------------------------------------------

constexpr std::uint32_t kCounts[] = {0, 1, 2, 5};

struct GridView {
  GridResult grid;
  double seconds = 0.0;
  std::size_t seeds = 0;

  const RunSummary& at(EngineKind p, std::uint32_t k, std::size_t seed_index) const {
    std::size_t pi = p == EngineKind::kAodv ? 0 : p == EngineKind::kSaodv ? 1 : 2;
    std::size_t ki = 0;
    while (kCounts[ki] != k) ++ki;
    return grid.cells.at((pi * 4 + ki) * seeds + seed_index).output.summary;
  }
  double mean(EngineKind p, std::uint32_t k,
              const std::function<double(const RunSummary&)>& f) const {
    double sum = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) sum += f(at(p, k, s));
    return sum / static_cast<double>(seeds);
  }
};

double loss_of(const RunSummary& s) { return static_cast<double>(s.lost()); }
double throughput_of(const RunSummary& s) { return s.throughput_bps(); }

GridView run_full_grid() {
  GridSpec spec;
  spec.protocols = {EngineKind::kAodv, EngineKind::kSaodv, EngineKind::kPcAodvBh};
  spec.attacker_counts.assign(std::begin(kCounts), std::end(kCounts));
  for (std::uint64_t s = 1; s <= 20; ++s) spec.seeds.push_back(s);
  GridView view;
  view.seeds = spec.seeds.size();
  const auto start = Clock::now();
  view.grid = run_grid(spec);
  view.seconds = seconds_since(start);
  return view;
}

Verdict attack_effect(const GridView& g) {
  bool means_ok = true;
  std::string means = "loss";
  for (std::size_t i = 0; i < 4; ++i) {
    means += format(" %.1f", g.mean(EngineKind::kAodv, kCounts[i], loss_of));
  }
  means += ", throughput";
  for (std::size_t i = 0; i < 4; ++i) {
    means += format(" %.0f", g.mean(EngineKind::kAodv, kCounts[i], throughput_of));
  }
  for (std::size_t i = 0; i + 1 < 4; ++i) {
    means_ok = means_ok &&
               g.mean(EngineKind::kAodv, kCounts[i], loss_of) <
                   g.mean(EngineKind::kAodv, kCounts[i + 1], loss_of) &&
               g.mean(EngineKind::kAodv, kCounts[i], throughput_of) >
                   g.mean(EngineKind::kAodv, kCounts[i + 1], throughput_of);
  }
  // Seed pairs: the same seed at consecutive attacker counts.
  int pairs = 0, loss_ordered = 0, thr_ordered = 0;
  for (std::size_t s = 0; s < g.seeds; ++s) {
    for (std::size_t i = 0; i + 1 < 4; ++i) {
      const RunSummary& a = g.at(EngineKind::kAodv, kCounts[i], s);
      const RunSummary& b = g.at(EngineKind::kAodv, kCounts[i + 1], s);
      ++pairs;
      if (b.lost() > a.lost()) ++loss_ordered;
      if (b.throughput_bps() < a.throughput_bps()) ++thr_ordered;
    }
  }
  const bool pairs_ok = loss_ordered >= 0.95 * pairs && thr_ordered >= 0.95 * pairs;
  return {means_ok && pairs_ok && g.seconds < 300.0,
          format("means %s (%s); seed pairs ordered: loss %d/%d, throughput %d/%d; "
                 "grid %.1f s",
                 means_ok ? "strictly ordered" : "NOT ordered", means.c_str(), loss_ordered,
                 pairs, thr_ordered, pairs, g.seconds)};
}

Verdict defense_effect(const GridView& g) {
  bool ok = true;
  std::string detail;
  for (std::uint32_t k : {1u, 2u, 5u}) {
    const double pc = g.mean(EngineKind::kPcAodvBh, k, loss_of);
    const double sa = g.mean(EngineKind::kSaodv, k, loss_of);
    const double ao = g.mean(EngineKind::kAodv, k, loss_of);
    const bool first = k == 1 ? pc <= 1.05 * sa : pc <= sa;
    ok = ok && first && sa <= ao;
    detail += format("%sk=%u: PC %.1f, SAODV %.1f, AODV %.1f", detail.empty() ? "" : "; ",
                     k, pc, sa, ao);
  }
  return {ok, "mean loss " + detail};
}

Verdict conservation(const GridView& g) {
  std::size_t held = 0, failed = 0;
  for (const auto& c : g.grid.cells) {
    if (!c.ok) {
      ++failed;
    } else if (conservation_holds(c.output.summary)) {
      ++held;
    }
  }
  return {held == g.grid.cells.size(),
          format("%zu/%zu runs conserve packets, %zu runs failed", held, g.grid.cells.size(),
                 failed)};
}

// --- elimination --------------------------------------------------------------------

Verdict elimination() {
  const ScenarioConfig cfg = testing::forced_path_scenario();
  const NodeId source = cfg.traffic.flows.at(0).src;
  const NodeId attacker = cfg.attacker_ids.at(0);
  VectorTraceSink sink;
  simulate(cfg, &sink);
  const auto& ev = sink.events;

  std::size_t detected_at = ev.size();
  int timeouts = 0;
  std::int64_t last_level = -1;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const TraceEvent& e = ev[i];
    if (e.node != source || e.peer != attacker) continue;
    if (e.kind == EventKind::kFidelityUpdate && e.reason == "timeout") {
      ++timeouts;
      last_level = e.value;
    }
    if (e.kind == EventKind::kElimination && e.reason == "detected") {
      detected_at = i;
      break;
    }
  }
  if (detected_at == ev.size()) {
    return {false, format("attacker never eliminated (%d timeouts charged)", timeouts)};
  }

  // From the moment a node learns of the attacker, it must not route via it.
  std::map<NodeId, std::size_t> informed{{source, detected_at}};
  const std::string alarm_suffix = ":" + std::to_string(attacker);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const TraceEvent& e = ev[i];
    if (e.node == attacker || e.kind != EventKind::kReceive) continue;
    if (e.key.starts_with("x:") && e.key.ends_with(alarm_suffix)) {
      informed.try_emplace(e.node, i);
    }
  }
  int violations = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const TraceEvent& e = ev[i];
    auto it = informed.find(e.node);
    if (it == informed.end() || i < it->second) continue;
    if (e.kind == EventKind::kRouteUpdate && e.reason != "down" && e.next_hop == attacker) {
      ++violations;
    }
    if (e.kind == EventKind::kSend && e.peer == attacker) ++violations;
  }
  const std::size_t receivers = informed.size() - 1;
  const bool ok = last_level == 0 && timeouts <= cfg.routing.phi_initial &&
                  receivers > 0 && violations == 0;
  return {ok, format("level 0 after %d timeouts (limit %d); %zu honest ALARM receivers; "
                     "%d routing uses of the attacker afterwards",
                     timeouts, cfg.routing.phi_initial, receivers, violations)};
}

}  // namespace
}  // namespace manet

int main() {
  using namespace manet;
  int failures = 0;
  auto report = [&failures](const char* name, const Verdict& v) {
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
  };
  report("crypto_soundness", crypto_soundness());
  report("route_update_oracle", route_rule_oracle());
  report("static_line", static_line());
  report("determinism", determinism());
  const GridView grid = run_full_grid();
  report("attack_effect", attack_effect(grid));
  report("defense_effect", defense_effect(grid));
  report("elimination", elimination());
  report("conservation", conservation(grid));
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 3;
}
