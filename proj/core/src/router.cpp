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

#include "manet/router.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace manet {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string route_key(NodeId dst) { return "r:" + std::to_string(dst); }

}  // namespace

std::string_view engine_kind_name(EngineKind k) {
  switch (k) {
    case EngineKind::kAodv: return "AODV";
    case EngineKind::kBlackhole: return "BLACKHOLE";
    case EngineKind::kSaodv: return "SAODV";
    case EngineKind::kPcAodvBh: return "PC_AODV_BH";
  }
  return "?";
}

EngineKind parse_engine_kind(std::string_view name) {
  if (name == "AODV") return EngineKind::kAodv;
  if (name == "BLACKHOLE") return EngineKind::kBlackhole;
  if (name == "SAODV") return EngineKind::kSaodv;
  if (name == "PC_AODV_BH" || name == "PC-AODV-BH") return EngineKind::kPcAodvBh;
  throw std::invalid_argument("unknown engine kind: " + std::string(name));
}

Router::Router(NodeId id, EngineKind kind, const ProtocolParams& params,
               const CryptoSuite* crypto, std::uint64_t seed)
    : params_(params),
      crypto_(kind == EngineKind::kAodv ? nullptr : crypto),
      chain_rng_(seed, Stream::kCryptoSeeds, id),
      jitter_rng_(seed, Stream::kJitter, id) {
  state_.id = id;
  state_.kind = kind;
  state_.fidelity = FidelityState(id, params.phi_initial, params.phi_threshold);
  if ((kind == EngineKind::kSaodv || kind == EngineKind::kPcAodvBh) &&
      crypto_ == nullptr) {
    throw std::invalid_argument("secured engine requires a crypto suite");
  }
}

void Router::start(Effects& fx) {
  if (uses_fidelity()) {
    fx.timers.push_back({fx.now + params_.fidelity_period, FidelityTimer{}});
  }
}

void Router::send_data(DataPacket pkt, Effects& fx) {
  pkt.ttl = params_.net_diameter;
  forward_data(pkt, fx);
}

void Router::receive(const RoutingMessage& msg, NodeId from, Effects& fx) {
  if (state_.kind == EngineKind::kBlackhole) {
    if (const auto* rreq = std::get_if<Rreq>(&msg)) {
      blackhole_recv_rreq(*rreq, from, fx);
    } else if (std::holds_alternative<DataPacket>(msg)) {
      trace_drop(fx, msg, drop::kBlackhole);
    }
    return;
  }
  std::visit(Overloaded{
                 [&](const Rreq& m) { recv_rreq(m, from, fx); },
                 [&](const Rrep& m) { recv_rrep(m, from, fx); },
                 [&](const Rerr& m) { recv_rerr(m, from, fx); },
                 [&](const DataPacket& m) { recv_data(m, from, fx); },
                 [&](const AckPacket& m) { recv_ack(m, from, fx); },
                 [&](const AlarmPacket& m) { recv_alarm(m, from, fx); },
                 [&](const FidelityExchange& m) { merge_fidelity(m, fx); },
             },
             msg);
}

void Router::on_timer(const Timer& timer, Effects& fx) {
  std::visit(
      Overloaded{
          [&](const DiscoveryTimer& t) {
            auto it = state_.pending_discoveries.find(t.dst);
            if (it == state_.pending_discoveries.end()) return;
            PendingDiscovery& pd = it->second;
            if (!pd.active || pd.generation != t.generation) return;
            if (state_.routing_table.lookup(t.dst, fx.now)) {
              flush_buffer(t.dst, fx);
            } else if (pd.retries < params_.discovery_retries) {
              ++pd.retries;
              originate_discovery(t.dst, fx);
            } else {
              drop_buffer(t.dst, fx);
            }
          },
          [&](const AckTimer& t) { on_ack_timeout(t.key, fx); },
          [&](const FidelityTimer&) { exchange_fidelity(fx); },
      },
      timer);
}

void Router::on_link_break(NodeId next_hop, const RoutingMessage& failed,
                           Effects& fx) {
  handle_link_break(next_hop, fx);
  const auto* pkt = std::get_if<DataPacket>(&failed);
  if (pkt == nullptr) {
    trace_drop(fx, failed, "link_break");
    return;
  }
  auto pending = state_.pending_acks.find(key_of(*pkt));
  if (pending != state_.pending_acks.end() &&
      pending->second.next_hop == next_hop) {
    state_.pending_acks.erase(pending);
  }
  if (pkt->src == id()) {
    DataPacket again = *pkt;
    again.ttl = params_.net_diameter;
    PendingDiscovery& pd = state_.pending_discoveries[pkt->dst];
    pd.buffered.push_back(again);
    if (!pd.active) originate_discovery(pkt->dst, fx);
  } else {
    trace_drop(fx, failed, drop::kNoRoute, "link_break");
  }
}

std::size_t Router::buffered_data() const {
  std::size_t n = 0;
  for (const auto& [dst, pd] : state_.pending_discoveries) {
    n += pd.buffered.size();
  }
  return n;
}

// ---------------------------------------------------------------------------
// Security helpers

SecurityExtension Router::fresh_chain(std::uint32_t hop_count) {
  const HashFunction& h = crypto_->hash;
  Bytes seed = chain_rng_.bytes(h.digest_size());
  ChainPair pair = chain_init(h, seed, params_.net_diameter);
  SecurityExtension ext;
  ext.hash = std::move(pair.hash);
  for (std::uint32_t i = 0; i < hop_count; ++i) ext.hash = chain_step(h, ext.hash);
  ext.top_hash = std::move(pair.top_hash);
  ext.max_hop_count = params_.net_diameter;
  return ext;
}

template <class Msg>
void Router::secure(Msg& msg, std::uint32_t hop_count, SignatureKind kind,
                    Bytes dest_reply) {
  SecurityExtension ext;
  if constexpr (!std::is_same_v<Msg, AlarmPacket>) {
    ext = fresh_chain(hop_count);
  }
  ext.dest_reply = std::move(dest_reply);
  msg.security = ext;
  msg.security = sign(RoutingMessage{msg}, id(), crypto_->keys, kind);
}

template <class Msg>
void Router::advance_chain(Msg& msg) const {
  if (crypto_ != nullptr && msg.security) {
    msg.security->hash = chain_step(crypto_->hash, msg.security->hash);
  }
}

bool Router::check_security(const RoutingMessage& msg,
                            std::optional<std::uint32_t> hop_count,
                            Effects& fx) {
  if (!secured()) return true;
  const auto* slot = security_of(msg);
  bool ok = slot != nullptr && slot->has_value();
  if (ok) {
    const SecurityExtension& ext = **slot;
    if (const auto* rreq = std::get_if<Rreq>(&msg)) {
      ok = ext.signer == rreq->src;
    } else if (const auto* alarm = std::get_if<AlarmPacket>(&msg)) {
      ok = ext.signer == alarm->accuser;
    }
    ok = ok && verify(msg, ext, crypto_->keys);
    if (ok && hop_count) {
      ok = chain_verify(crypto_->hash, ext.hash, ext.top_hash, *hop_count,
                        ext.max_hop_count);
    }
  }
  if (!ok) {
    ++state_.verify_failures;
    trace_drop(fx, msg, "verify");
  }
  return ok;
}

bool Router::trusted_next_hop(NodeId node) const {
  if (state_.blacklist.contains(node)) return false;
  if (!uses_fidelity()) return true;
  return state_.fidelity.level(node) > state_.fidelity.threshold();
}

bool Router::accepts_reply_from(const Rrep& rrep, NodeId from) const {
  if (!trusted_next_hop(from)) return false;
  const NodeId second = rrep.sender_next_hop;
  if (second == kNoNode || second == rrep.dst || second == id()) return true;
  return trusted_next_hop(second);
}

// ---------------------------------------------------------------------------
// Route discovery

void Router::originate_discovery(NodeId dst, Effects& fx) {
  PendingDiscovery& pd = state_.pending_discoveries[dst];
  pd.active = true;
  ++pd.generation;

  ++state_.own_seq;
  Rreq rreq;
  rreq.src = id();
  rreq.src_seq = state_.own_seq;
  rreq.broadcast_id = state_.next_broadcast_id++;
  rreq.dst = dst;
  if (const RouteEntry* known = state_.routing_table.find(dst)) {
    rreq.dst_seq = known->dst_seq;
  }
  rreq.hop_count = 0;
  rreq.ttl = params_.net_diameter;
  if (secured()) secure(rreq, 0, SignatureKind::kSingle);
  state_.seen_rreqs.insert({rreq.src, rreq.broadcast_id});
  fx.sends.push_back({kBroadcast, rreq, 0.0});

  const double wait = params_.discovery_wait * std::ldexp(1.0, static_cast<int>(pd.retries));
  fx.timers.push_back({fx.now + wait, DiscoveryTimer{dst, pd.generation}});
}

void Router::recv_rreq(const Rreq& rreq, NodeId from, Effects& fx) {
  if (rreq.src == id()) {
    trace_drop(fx, rreq, "duplicate");
    return;
  }
  if (state_.blacklist.contains(from)) {
    trace_drop(fx, rreq, "blacklisted");
    return;
  }
  const std::pair<NodeId, std::uint32_t> flood{rreq.src, rreq.broadcast_id};
  if (state_.seen_rreqs.contains(flood)) {
    trace_drop(fx, rreq, "duplicate");
    return;
  }
  if (!check_security(rreq, rreq.hop_count, fx)) return;
  state_.seen_rreqs.insert(flood);

  RouteEntry reverse;
  reverse.dst = rreq.src;
  reverse.dst_seq = rreq.src_seq;
  reverse.next_hop = from;
  reverse.hop_count = rreq.hop_count + 1;
  reverse.expires_at = fx.now + params_.reverse_route_timeout;
  RouteDecision d = state_.routing_table.offer(reverse, fx.now);
  if (d != RouteDecision::kRejected) {
    trace_route(fx, *state_.routing_table.find(rreq.src), route_decision_name(d));
  } else if (RouteEntry* e = state_.routing_table.find(rreq.src);
             e != nullptr && e->valid_at(fx.now) && e->next_hop == from) {
    e->expires_at = std::max(e->expires_at, reverse.expires_at);
  }

  if (rreq.dst == id()) {
    reply_as_destination(rreq, from, fx);
    return;
  }
  if (params_.intermediate_replies) {
    if (auto route = state_.routing_table.lookup(rreq.dst, fx.now);
        route && route->dst_seq >= rreq.dst_seq && route->next_hop != from &&
        trusted_next_hop(route->next_hop) &&
        reply_from_cache(rreq, from, *route, fx)) {
      return;
    }
  }
  if (rreq.ttl == 0) {
    trace_drop(fx, rreq, "ttl");
    return;
  }
  Rreq fwd = rreq;
  ++fwd.hop_count;
  --fwd.ttl;
  advance_chain(fwd);
  fx.sends.push_back(
      {kBroadcast, std::move(fwd), jitter_rng_.uniform(0.0, params_.broadcast_jitter)});
}

void Router::reply_as_destination(const Rreq& rreq, NodeId from, Effects& fx) {
  state_.own_seq = std::max(state_.own_seq, rreq.dst_seq);
  Rrep rep;
  rep.originator = rreq.src;
  rep.dst = id();
  rep.dst_seq = state_.own_seq;
  rep.hop_count = 0;
  rep.lifetime = params_.my_route_timeout;
  rep.sender_next_hop = kNoNode;
  if (secured()) secure(rep, 0, SignatureKind::kSingle);
  NodeId via = from;
  if (auto back = state_.routing_table.lookup(rreq.src, fx.now)) via = back->next_hop;
  fx.sends.push_back({via, std::move(rep), 0.0});
}

bool Router::reply_from_cache(const Rreq& rreq, NodeId from,
                              const RouteEntry& route, Effects& fx) {
  Rrep rep;
  rep.originator = rreq.src;
  rep.dst = rreq.dst;
  rep.dst_seq = route.dst_seq;
  rep.hop_count = route.hop_count;
  rep.lifetime = route.expires_at - fx.now;
  rep.sender_next_hop = route.next_hop;
  if (secured()) {
    // Double signature: our own plus the destination's from the cached reply.
    if (route.hop_count > params_.net_diameter) return false;
    auto cached = state_.cached_dest_replies.find(rreq.dst);
    if (cached == state_.cached_dest_replies.end()) return false;
    const auto original = decode(cached->second);
    if (std::get<Rrep>(original).dst_seq != route.dst_seq) return false;
    secure(rep, route.hop_count, SignatureKind::kDouble, cached->second);
  }
  NodeId via = from;
  if (auto back = state_.routing_table.lookup(rreq.src, fx.now)) via = back->next_hop;
  if (RouteEntry* fwd = state_.routing_table.find(rreq.dst)) fwd->precursors.insert(via);
  if (RouteEntry* rev = state_.routing_table.find(rreq.src)) {
    rev->precursors.insert(route.next_hop);
  }
  fx.sends.push_back({via, std::move(rep), 0.0});
  return true;
}

void Router::blackhole_recv_rreq(const Rreq& rreq, NodeId from, Effects& fx) {
  const std::pair<NodeId, std::uint32_t> flood{rreq.src, rreq.broadcast_id};
  if (!state_.seen_rreqs.insert(flood).second) {
    trace_drop(fx, rreq, "duplicate");
    return;
  }
  // Claims a one-hop route fresher than anything the requester knows, without
  // consulting the routing table, and never relays the request.
  Rrep forged;
  forged.originator = rreq.src;
  forged.dst = rreq.dst;
  forged.dst_seq = rreq.dst_seq + params_.bh_seq_boost;
  forged.hop_count = 1;
  forged.lifetime = params_.my_route_timeout;
  forged.sender_next_hop = rreq.dst;
  if (secured()) secure(forged, 1, SignatureKind::kSingle);
  fx.sends.push_back({from, std::move(forged), 0.0});
}

void Router::recv_rrep(const Rrep& rrep, NodeId from, Effects& fx) {
  if (state_.blacklist.contains(from)) {
    trace_drop(fx, rrep, "blacklisted");
    return;
  }
  if (!check_security(rrep, rrep.hop_count, fx)) return;
  if (uses_fidelity() && !accepts_reply_from(rrep, from)) {
    trace_drop(fx, rrep, "distrusted");
    return;
  }
  if (rrep.dst == id()) {
    trace_drop(fx, rrep, "self");
    return;
  }

  RouteEntry candidate;
  candidate.dst = rrep.dst;
  candidate.dst_seq = rrep.dst_seq;
  candidate.next_hop = from;
  candidate.hop_count = rrep.hop_count + 1;
  candidate.expires_at = fx.now + rrep.lifetime;
  candidate.second_hop = rrep.sender_next_hop;
  const RouteDecision d = state_.routing_table.offer(candidate, fx.now);
  const bool updated = d != RouteDecision::kRejected;
  if (updated) {
    trace_route(fx, *state_.routing_table.find(rrep.dst), route_decision_name(d));
    if (secured()) {
      const SecurityExtension& ext = *rrep.security;
      if (ext.sig_kind == SignatureKind::kDouble) {
        state_.cached_dest_replies[rrep.dst] = ext.dest_reply;
      } else if (ext.signer == rrep.dst) {
        state_.cached_dest_replies[rrep.dst] = canonical_bytes(rrep, true);
      } else {
        state_.cached_dest_replies.erase(rrep.dst);
      }
    }
  }

  if (rrep.originator == id()) {
    flush_buffer(rrep.dst, fx);
    return;
  }
  auto back = state_.routing_table.lookup(rrep.originator, fx.now);
  if (!back || !trusted_next_hop(back->next_hop)) {
    trace_drop(fx, rrep, drop::kNoRoute);
    return;
  }
  if (updated) {
    state_.routing_table.find(rrep.dst)->precursors.insert(back->next_hop);
    state_.routing_table.find(rrep.originator)->precursors.insert(from);
  }
  Rrep fwd = rrep;
  fwd.hop_count = rrep.hop_count + 1;
  fwd.sender_next_hop = from;
  advance_chain(fwd);
  fx.sends.push_back({back->next_hop, std::move(fwd), 0.0});
}

// ---------------------------------------------------------------------------
// Data plane

void Router::forward_data(DataPacket pkt, Effects& fx) {
  const auto route = state_.routing_table.lookup(pkt.dst, fx.now);
  if (pkt.src == id()) {
    if (!route) {
      PendingDiscovery& pd = state_.pending_discoveries[pkt.dst];
      pd.buffered.push_back(pkt);
      if (!pd.active) originate_discovery(pkt.dst, fx);
      return;
    }
    transmit_data(pkt, *route, fx);
    return;
  }
  if (pkt.ttl == 0) {
    trace_drop(fx, pkt, drop::kNoRoute, "ttl");
    return;
  }
  if (!route) {
    trace_drop(fx, pkt, drop::kNoRoute);
    return;
  }
  if (uses_fidelity()) {
    const std::int32_t self_level = state_.fidelity.level(id());
    const std::int32_t next_level = state_.fidelity.level(route->next_hop);
    if (!fidelity_gate(self_level, next_level, state_.fidelity.threshold())) {
      trace_drop(fx, pkt, drop::kGate,
                 "sum=" + std::to_string(self_level + next_level));
      RouteEntry* e = state_.routing_table.find(pkt.dst);
      e->state = RouteState::kDown;
      ++e->dst_seq;
      trace_route(fx, *e, "down");
      send_rerr({{e->dst, e->dst_seq}}, !e->precursors.empty(), fx);
      return;
    }
  }
  transmit_data(pkt, *route, fx);
}

void Router::transmit_data(DataPacket pkt, const RouteEntry& route, Effects& fx) {
  if (RouteEntry* e = state_.routing_table.find(pkt.dst)) {
    e->expires_at = std::max(e->expires_at, fx.now + params_.active_route_timeout);
  }
  if (pkt.src != id()) --pkt.ttl;
  if (uses_fidelity()) {
    const PacketKey key = key_of(pkt);
    state_.pending_acks[key] = {fx.now + params_.ack_timeout, route.next_hop,
                                route.second_hop, pkt.dst};
    state_.fidelity.count_received(route.next_hop);
    fx.timers.push_back({fx.now + params_.ack_timeout, AckTimer{key}});
  }
  fx.sends.push_back({route.next_hop, pkt, 0.0});
}

void Router::recv_data(const DataPacket& pkt, NodeId from, Effects& fx) {
  if (RouteEntry* back = state_.routing_table.find(pkt.src);
      back != nullptr && back->state == RouteState::kUp && back->next_hop == from) {
    back->expires_at = std::max(back->expires_at, fx.now + params_.active_route_timeout);
  }
  if (pkt.dst != id()) {
    forward_data(pkt, fx);
    return;
  }
  TraceEvent e;
  e.time = fx.now;
  e.node = id();
  e.kind = EventKind::kDeliver;
  e.key = trace_key(key_of(pkt));
  e.peer = pkt.src;
  e.value = pkt.payload_bytes;
  e.latency = fx.now - pkt.sent_at;
  fx.events.push_back(std::move(e));

  if (uses_fidelity()) {
    AckPacket ack{id(), pkt.src, pkt.flow_id, pkt.packet_seq};
    if (auto back = state_.routing_table.lookup(pkt.src, fx.now)) {
      fx.sends.push_back({back->next_hop, ack, 0.0});
    } else {
      trace_drop(fx, ack, drop::kNoRoute);
    }
  }
}

void Router::flush_buffer(NodeId dst, Effects& fx) {
  auto it = state_.pending_discoveries.find(dst);
  if (it == state_.pending_discoveries.end()) return;
  const auto route = state_.routing_table.lookup(dst, fx.now);
  if (!route) return;
  std::deque<DataPacket> buffered = std::move(it->second.buffered);
  state_.pending_discoveries.erase(it);
  for (const DataPacket& pkt : buffered) transmit_data(pkt, *route, fx);
}

void Router::drop_buffer(NodeId dst, Effects& fx) {
  auto it = state_.pending_discoveries.find(dst);
  if (it == state_.pending_discoveries.end()) return;
  for (const DataPacket& pkt : it->second.buffered) {
    trace_drop(fx, pkt, drop::kNoRoute, "discovery_failed");
  }
  state_.pending_discoveries.erase(it);
}

// ---------------------------------------------------------------------------
// Acknowledgements and fidelity

void Router::recv_ack(const AckPacket& ack, NodeId /*from*/, Effects& fx) {
  if (uses_fidelity()) on_ack(ack, fx);
  if (ack.src_of_data == id()) return;
  if (auto back = state_.routing_table.lookup(ack.src_of_data, fx.now)) {
    fx.sends.push_back({back->next_hop, ack, 0.0});
  } else {
    trace_drop(fx, ack, drop::kNoRoute);
  }
}

void Router::on_ack(const AckPacket& ack, Effects& fx) {
  auto it = state_.pending_acks.find(key_of(ack));
  if (it == state_.pending_acks.end()) return;
  if (fx.now > it->second.deadline) return;  // the timeout owns this key
  const PendingAck pa = it->second;
  state_.pending_acks.erase(it);
  state_.fidelity.count_forwarded(pa.next_hop);
  charge(pa.next_hop, +1, pa.data_dst, fx);
  charge(pa.second_hop, +1, pa.data_dst, fx);
}

void Router::on_ack_timeout(const PacketKey& key, Effects& fx) {
  auto it = state_.pending_acks.find(key);
  if (it == state_.pending_acks.end()) return;
  const PendingAck pa = it->second;
  state_.pending_acks.erase(it);
  charge(pa.next_hop, -1, pa.data_dst, fx);
  charge(pa.second_hop, -1, pa.data_dst, fx);
}

void Router::charge(NodeId node, std::int32_t delta, NodeId data_dst,
                    Effects& fx) {
  // Endpoints do not forward, so they are never credited or blamed.
  if (node == kNoNode || node == id() || node == data_dst ||
      state_.blacklist.contains(node)) {
    return;
  }
  const std::int32_t level = state_.fidelity.adjust(node, delta);
  TraceEvent e;
  e.time = fx.now;
  e.node = id();
  e.kind = EventKind::kFidelityUpdate;
  e.key = "l:" + std::to_string(node);
  e.peer = node;
  e.value = level;
  e.value2 = delta;
  e.reason = delta > 0 ? "ack" : "timeout";
  fx.events.push_back(std::move(e));
  if (level == 0) eliminate_node(node, fx);
}

void Router::eliminate_node(NodeId accused, Effects& fx) {
  if (accused == id() || state_.blacklist.contains(accused)) return;
  apply_blacklist(accused, "detected", fx);
  AlarmPacket alarm{id(), accused, std::nullopt};
  if (secured()) secure(alarm, 0, SignatureKind::kSingle);
  state_.seen_alarms.insert({id(), accused});
  fx.sends.push_back({kBroadcast, std::move(alarm), 0.0});
}

void Router::recv_alarm(const AlarmPacket& alarm, NodeId from, Effects& fx) {
  if (!uses_fidelity()) return;
  if (state_.blacklist.contains(from)) {
    trace_drop(fx, alarm, "blacklisted");
    return;
  }
  const std::pair<NodeId, NodeId> id_pair{alarm.accuser, alarm.accused};
  if (state_.seen_alarms.contains(id_pair)) {
    trace_drop(fx, alarm, "duplicate");
    return;
  }
  if (!check_security(alarm, std::nullopt, fx)) return;
  state_.seen_alarms.insert(id_pair);
  if (alarm.accused != id() && !state_.blacklist.contains(alarm.accused)) {
    apply_blacklist(alarm.accused, "alarm", fx);
  }
  fx.sends.push_back(
      {kBroadcast, alarm, jitter_rng_.uniform(0.0, params_.broadcast_jitter)});
}

void Router::apply_blacklist(NodeId accused, std::string_view reason,
                             Effects& fx) {
  state_.blacklist.insert(accused);
  state_.fidelity.forget(accused);
  TraceEvent e;
  e.time = fx.now;
  e.node = id();
  e.kind = EventKind::kElimination;
  e.key = "l:" + std::to_string(accused);
  e.peer = accused;
  e.reason = std::string(reason);
  fx.events.push_back(std::move(e));
  invalidate_via(accused, fx);
}

void Router::invalidate_via(NodeId node, Effects& fx) {
  std::vector<std::pair<NodeId, SeqNum>> unreachable;
  bool have_precursors = false;
  for (auto& [dst, e] : state_.routing_table.entries()) {
    if (e.state != RouteState::kUp || (e.next_hop != node && dst != node)) continue;
    e.state = RouteState::kDown;
    ++e.dst_seq;
    trace_route(fx, e, "down");
    unreachable.emplace_back(dst, e.dst_seq);
    have_precursors = have_precursors || !e.precursors.empty();
  }
  send_rerr(std::move(unreachable), have_precursors, fx);
}

void Router::exchange_fidelity(Effects& fx) {
  FidelityExchange report = state_.fidelity.snapshot();
  if (!report.entries.empty()) fx.sends.push_back({kBroadcast, std::move(report), 0.0});
  fx.timers.push_back({fx.now + params_.fidelity_period, FidelityTimer{}});
}

void Router::merge_fidelity(const FidelityExchange& report, Effects& fx) {
  if (!uses_fidelity() || state_.blacklist.contains(report.sender)) return;
  FidelityExchange filtered;
  filtered.sender = report.sender;
  for (const auto& [node, level] : report.entries) {
    if (!state_.blacklist.contains(node)) filtered.entries[node] = level;
  }
  for (NodeId node : state_.fidelity.merge(filtered)) {
    TraceEvent e;
    e.time = fx.now;
    e.node = id();
    e.kind = EventKind::kFidelityUpdate;
    e.key = "l:" + std::to_string(node);
    e.peer = node;
    e.value = state_.fidelity.level(node);
    e.reason = "merged";
    fx.events.push_back(std::move(e));
  }
}

// ---------------------------------------------------------------------------
// Route maintenance

void Router::handle_link_break(NodeId next_hop, Effects& fx) {
  std::vector<std::pair<NodeId, SeqNum>> unreachable;
  bool have_precursors = false;
  for (auto& [dst, e] : state_.routing_table.entries()) {
    if (e.state != RouteState::kUp || e.next_hop != next_hop) continue;
    e.state = RouteState::kDown;
    ++e.dst_seq;
    trace_route(fx, e, "down");
    unreachable.emplace_back(dst, e.dst_seq);
    have_precursors = have_precursors || !e.precursors.empty();
  }
  send_rerr(std::move(unreachable), have_precursors, fx);
}

void Router::recv_rerr(const Rerr& rerr, NodeId from, Effects& fx) {
  std::vector<std::pair<NodeId, SeqNum>> unreachable;
  bool have_precursors = false;
  for (const auto& [dst, seq] : rerr.unreachable) {
    RouteEntry* e = state_.routing_table.find(dst);
    if (e == nullptr || e->state != RouteState::kUp || e->next_hop != from) continue;
    e->state = RouteState::kDown;
    e->dst_seq = std::max(e->dst_seq, seq);
    trace_route(fx, *e, "down");
    unreachable.emplace_back(dst, e->dst_seq);
    have_precursors = have_precursors || !e->precursors.empty();
  }
  send_rerr(std::move(unreachable), have_precursors, fx);
}

void Router::send_rerr(std::vector<std::pair<NodeId, SeqNum>> unreachable,
                       bool have_precursors, Effects& fx) {
  if (unreachable.empty() || !have_precursors) return;
  fx.sends.push_back({kBroadcast, Rerr{std::move(unreachable)}, 0.0});
}

// ---------------------------------------------------------------------------
// Tracing

void Router::trace(Effects& fx, EventKind kind, std::string key, NodeId peer,
                   std::string_view reason) const {
  TraceEvent e;
  e.time = fx.now;
  e.node = id();
  e.kind = kind;
  e.key = std::move(key);
  e.peer = peer;
  e.reason = std::string(reason);
  fx.events.push_back(std::move(e));
}

void Router::trace_drop(Effects& fx, const RoutingMessage& msg,
                        std::string_view reason, std::string_view detail) const {
  TraceEvent e;
  e.time = fx.now;
  e.node = id();
  e.kind = EventKind::kDrop;
  e.key = trace_key(msg);
  e.reason = std::string(reason);
  e.detail = std::string(detail);
  fx.events.push_back(std::move(e));
}

void Router::trace_route(Effects& fx, const RouteEntry& entry,
                         std::string_view reason) const {
  TraceEvent e;
  e.time = fx.now;
  e.node = id();
  e.kind = EventKind::kRouteUpdate;
  e.key = route_key(entry.dst);
  e.peer = entry.dst;
  e.next_hop = entry.next_hop;
  e.value = entry.dst_seq;
  e.value2 = entry.hop_count;
  e.reason = std::string(reason);
  fx.events.push_back(std::move(e));
}

}  // namespace manet
