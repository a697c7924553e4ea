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

#include "manet/simulator.hpp"

#include <algorithm>
#include <stdexcept>

namespace manet {
namespace {

const ScenarioConfig& validated(const ScenarioConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

Simulator::Simulator(const ScenarioConfig& cfg, TraceSink* trace)
    : cfg_(validated(cfg)),
      resolved_(resolve_scenario(cfg_)),
      trace_(trace),
      collector_(cfg.sim_time, cfg.bucket_width) {
  const bool secured = cfg_.protocol == EngineKind::kSaodv ||
                       cfg_.protocol == EngineKind::kPcAodvBh;
  if (secured) {
    Rng key_rng(cfg_.seed, Stream::kKeys, 0);
    crypto_ = std::make_unique<CryptoSuite>(CryptoSuite{
        HashFunction(cfg_.hash),
        KeyRegistry::provision(cfg_.node_count, key_rng.next(), cfg_.signature)});
  }

  for (NodeId id = 0; id < cfg_.node_count; ++id) {
    const bool attacker = std::binary_search(resolved_.attackers.begin(),
                                             resolved_.attackers.end(), id);
    const EngineKind kind = attacker ? EngineKind::kBlackhole : cfg_.protocol;
    routers_.push_back(std::make_unique<Router>(id, kind, cfg_.routing,
                                                crypto_.get(), cfg_.seed));
    mobility_rngs_.emplace_back(cfg_.seed, Stream::kMobility, id);
    Vec2 start;
    if (!cfg_.positions.empty()) {
      start = cfg_.positions[id];
    } else {
      Rng& rng = mobility_rngs_.back();
      start.x = rng.uniform(0.0, cfg_.mobility.area_x);
      start.y = rng.uniform(0.0, cfg_.mobility.area_y);
    }
    mobility_.push_back(rwp_place(start));
  }
}

Simulator::~Simulator() = default;

Vec2 Simulator::position(NodeId id, double now) {
  mobility_[id] = rwp_step(mobility_[id], now, cfg_.mobility, mobility_rngs_[id]);
  return mobility_[id].position;
}

void Simulator::schedule(double at,
                         std::variant<Arrival, TimerFire, TrafficEmit> payload) {
  queue_.push(Event{at, next_seq_++, std::move(payload)});
}

void Simulator::emit(const TraceEvent& e) {
  collector_.record(e);
  if (trace_ != nullptr) trace_->record(e);
}

void Simulator::drain(NodeId node, Effects& fx) {
  for (const TraceEvent& e : fx.events) emit(e);
  fx.events.clear();
  // transmit() may re-enter the router on a link break; take the lists first.
  auto sends = std::move(fx.sends);
  auto timers = std::move(fx.timers);
  for (auto& s : sends) transmit(node, std::move(s), fx.now);
  for (auto& t : timers) schedule(t.fire_at, TimerFire{node, std::move(t.timer)});
}

void Simulator::transmit(NodeId from, Effects::Send send, double now) {
  auto msg = std::make_shared<const RoutingMessage>(std::move(send.msg));
  const double arrive_at =
      now + send.delay + hop_delay(wire_size(*msg), cfg_.radio);
  const bool is_data = std::holds_alternative<DataPacket>(*msg);

  TraceEvent e;
  e.time = now;
  e.node = from;
  e.kind = EventKind::kSend;
  e.key = trace_key(*msg);
  e.peer = send.to;
  e.detail = std::string(message_type_name(message_type(*msg)));

  if (send.to == kBroadcast) {
    std::vector<Vec2> positions(routers_.size());
    for (NodeId id = 0; id < routers_.size(); ++id) positions[id] = position(id, now);
    emit(e);
    for (NodeId v : neighbors(positions, from, cfg_.radio)) {
      schedule(arrive_at, Arrival{v, from, msg});
      if (is_data) ++data_in_air_;
    }
    return;
  }
  if (send.to < routers_.size() &&
      in_range(position(from, now), position(send.to, now), cfg_.radio)) {
    emit(e);
    schedule(arrive_at, Arrival{send.to, from, msg});
    if (is_data) ++data_in_air_;
    return;
  }
  Effects fx(now);
  routers_[from]->on_link_break(send.to, *msg, fx);
  drain(from, fx);
}

void Simulator::handle(const Arrival& a, double now) {
  if (std::holds_alternative<DataPacket>(*a.msg)) --data_in_air_;
  TraceEvent e;
  e.time = now;
  e.node = a.to;
  e.kind = EventKind::kReceive;
  e.key = trace_key(*a.msg);
  e.peer = a.from;
  emit(e);
  Effects fx(now);
  routers_[a.to]->receive(*a.msg, a.from, fx);
  drain(a.to, fx);
}

void Simulator::handle(const TimerFire& t, double now) {
  Effects fx(now);
  routers_[t.node]->on_timer(t.timer, fx);
  drain(t.node, fx);
}

void Simulator::handle(const TrafficEmit& t, double now) {
  const CbrFlow& flow = resolved_.flows[t.flow];
  DataPacket pkt;
  pkt.src = flow.src;
  pkt.dst = flow.dst;
  pkt.flow_id = t.flow;
  pkt.packet_seq = t.packet_seq;
  pkt.payload_bytes = cfg_.traffic.packet_size;
  pkt.sent_at = now;

  TraceEvent e;
  e.time = now;
  e.node = flow.src;
  e.kind = EventKind::kGenerate;
  e.key = trace_key(key_of(pkt));
  e.peer = flow.dst;
  e.value = pkt.payload_bytes;
  emit(e);

  Effects fx(now);
  routers_[flow.src]->send_data(pkt, fx);
  drain(flow.src, fx);

  const double next = flow.start_at + (t.packet_seq + 1) * cfg_.traffic.interval();
  if (next < cfg_.traffic_stop()) schedule(next, TrafficEmit{t.flow, t.packet_seq + 1});
}

RunOutput Simulator::run() {
  if (ran_) throw std::logic_error("Simulator::run called twice");
  ran_ = true;

  for (NodeId id = 0; id < routers_.size(); ++id) {
    Effects fx(0.0);
    routers_[id]->start(fx);
    drain(id, fx);
  }
  for (std::uint32_t f = 0; f < resolved_.flows.size(); ++f) {
    if (resolved_.flows[f].start_at < cfg_.traffic_stop()) {
      schedule(resolved_.flows[f].start_at, TrafficEmit{f, 0});
    }
  }

  while (!queue_.empty() && queue_.top().fire_at <= cfg_.sim_time) {
    Event ev = queue_.top();
    queue_.pop();
    ++processed_;
    std::visit([&](const auto& p) { handle(p, ev.fire_at); }, ev.payload);
  }

  std::uint64_t in_flight = data_in_air_;
  for (const auto& r : routers_) in_flight += r->buffered_data();
  TraceEvent end;
  end.time = cfg_.sim_time;
  end.kind = EventKind::kInFlight;
  end.key = "end";
  end.value = static_cast<std::int64_t>(in_flight);
  emit(end);

  RunOutput out;
  out.series = collector_.series();
  out.summary = collector_.summary();
  out.resolved = resolved_;
  out.events_processed = processed_;
  return out;
}

RunOutput simulate(const ScenarioConfig& cfg, TraceSink* trace) {
  Simulator sim(cfg, trace);
  return sim.run();
}

}  // namespace manet
