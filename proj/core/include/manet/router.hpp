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
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <variant>
#include <vector>

#include "manet/crypto.hpp"
#include "manet/fidelity.hpp"
#include "manet/messages.hpp"
#include "manet/rng.hpp"
#include "manet/trace.hpp"

namespace manet {

enum class EngineKind : std::uint8_t { kAodv, kBlackhole, kSaodv, kPcAodvBh };

std::string_view engine_kind_name(EngineKind k);
EngineKind parse_engine_kind(std::string_view name);

/// Routing knobs shared by every node of a run.
struct ProtocolParams {
  std::uint32_t net_diameter = 30;      // RREQ TTL and hash-chain length
  double active_route_timeout = 10.0;   // lifetime extension on use, s
  double my_route_timeout = 20.0;       // lifetime advertised in replies, s
  double reverse_route_timeout = 6.0;   // s
  double discovery_wait = 1.0;          // first RREQ wait, doubled per retry
  std::uint32_t discovery_retries = 3;
  bool intermediate_replies = true;
  double broadcast_jitter = 0.01;       // max rebroadcast jitter, s
  std::uint32_t bh_seq_boost = 100;
  std::int32_t phi_initial = 10;
  std::int32_t phi_threshold = 5;
  double ack_timeout = 0.5;             // s
  double fidelity_period = 5.0;         // s
};

struct DiscoveryTimer {
  NodeId dst = 0;
  std::uint64_t generation = 0;
};
struct AckTimer {
  PacketKey key;
};
struct FidelityTimer {};
using Timer = std::variant<DiscoveryTimer, AckTimer, FidelityTimer>;

/// Everything a router asks of the world during one call. The simulator
/// drains it; unit tests inspect it.
struct Effects {
  struct Send {
    NodeId to = kBroadcast;
    RoutingMessage msg;
    double delay = 0.0;  // extra queueing delay (rebroadcast jitter)
  };
  struct Schedule {
    double fire_at = 0.0;
    Timer timer;
  };

  explicit Effects(double t) : now(t) {}

  double now;
  std::vector<Send> sends;
  std::vector<Schedule> timers;
  std::vector<TraceEvent> events;

  template <class T>
  std::vector<const T*> sent() const {
    std::vector<const T*> out;
    for (const auto& s : sends) {
      if (const T* m = std::get_if<T>(&s.msg)) out.push_back(m);
    }
    return out;
  }
};

struct PendingDiscovery {
  std::deque<DataPacket> buffered;
  std::uint32_t retries = 0;
  std::uint64_t generation = 0;
  bool active = false;
};

struct PendingAck {
  double deadline = 0.0;
  NodeId next_hop = kNoNode;
  NodeId second_hop = kNoNode;
  NodeId data_dst = kNoNode;
};

struct NodeState {
  NodeId id = 0;
  EngineKind kind = EngineKind::kAodv;
  RouteTable routing_table;
  SeqNum own_seq = 0;
  std::uint32_t next_broadcast_id = 0;
  std::set<std::pair<NodeId, std::uint32_t>> seen_rreqs;
  std::map<NodeId, PendingDiscovery> pending_discoveries;
  FidelityState fidelity;
  std::map<PacketKey, PendingAck> pending_acks;
  std::set<NodeId> blacklist;
  std::set<std::pair<NodeId, NodeId>> seen_alarms;
  // Full wire image of the latest destination-signed reply per destination,
  // used to answer from cache with a double signature.
  std::map<NodeId, Bytes> cached_dest_replies;
  std::uint64_t verify_failures = 0;
};

/// One node's routing engine. All four engine kinds share this class; the
/// kind decides which checks and side channels are active.
class Router {
 public:
  /// `crypto` must be non-null for the secured kinds and for black holes in
  /// secured runs; it is ignored by plain AODV.
  Router(NodeId id, EngineKind kind, const ProtocolParams& params,
         const CryptoSuite* crypto, std::uint64_t seed);

  NodeState& state() { return state_; }
  const NodeState& state() const { return state_; }
  NodeId id() const { return state_.id; }
  EngineKind kind() const { return state_.kind; }
  bool secured() const { return crypto_ != nullptr; }

  /// Arms periodic timers. Called once at t = 0.
  void start(Effects& fx);

  /// Application entry: a locally generated data packet.
  void send_data(DataPacket pkt, Effects& fx);
  void receive(const RoutingMessage& msg, NodeId from, Effects& fx);
  void on_timer(const Timer& timer, Effects& fx);
  /// A unicast of `failed` to `next_hop` found no radio link.
  void on_link_break(NodeId next_hop, const RoutingMessage& failed,
                     Effects& fx);

  /// Data packets held while waiting for a route.
  std::size_t buffered_data() const;

  // Individual protocol operations; receive() and on_timer() dispatch here.
  void originate_discovery(NodeId dst, Effects& fx);
  void recv_rreq(const Rreq& rreq, NodeId from, Effects& fx);
  void recv_rrep(const Rrep& rrep, NodeId from, Effects& fx);
  void blackhole_recv_rreq(const Rreq& rreq, NodeId from, Effects& fx);
  void forward_data(DataPacket pkt, Effects& fx);
  void recv_data(const DataPacket& pkt, NodeId from, Effects& fx);
  void recv_ack(const AckPacket& ack, NodeId from, Effects& fx);
  void on_ack(const AckPacket& ack, Effects& fx);
  void on_ack_timeout(const PacketKey& key, Effects& fx);
  void eliminate_node(NodeId accused, Effects& fx);
  void recv_alarm(const AlarmPacket& alarm, NodeId from, Effects& fx);
  void exchange_fidelity(Effects& fx);
  void merge_fidelity(const FidelityExchange& report, Effects& fx);
  void handle_link_break(NodeId next_hop, Effects& fx);
  void recv_rerr(const Rerr& rerr, NodeId from, Effects& fx);

 private:
  bool uses_fidelity() const { return state_.kind == EngineKind::kPcAodvBh; }
  bool trusted_next_hop(NodeId node) const;
  bool accepts_reply_from(const Rrep& rrep, NodeId from) const;
  bool check_security(const RoutingMessage& msg,
                      std::optional<std::uint32_t> hop_count, Effects& fx);
  SecurityExtension fresh_chain(std::uint32_t hop_count);
  template <class Msg>
  void secure(Msg& msg, std::uint32_t hop_count, SignatureKind kind,
              Bytes dest_reply = {});
  template <class Msg>
  void advance_chain(Msg& msg) const;

  void reply_as_destination(const Rreq& rreq, NodeId from, Effects& fx);
  bool reply_from_cache(const Rreq& rreq, NodeId from, const RouteEntry& route,
                        Effects& fx);
  void transmit_data(DataPacket pkt, const RouteEntry& route, Effects& fx);
  void flush_buffer(NodeId dst, Effects& fx);
  void drop_buffer(NodeId dst, Effects& fx);
  void invalidate_via(NodeId node, Effects& fx);
  void apply_blacklist(NodeId accused, std::string_view reason, Effects& fx);
  void charge(NodeId node, std::int32_t delta, NodeId data_dst, Effects& fx);
  void send_rerr(std::vector<std::pair<NodeId, SeqNum>> unreachable,
                 bool have_precursors, Effects& fx);

  void trace(Effects& fx, EventKind kind, std::string key,
             NodeId peer = kNoNode, std::string_view reason = {}) const;
  void trace_drop(Effects& fx, const RoutingMessage& msg, std::string_view reason,
                  std::string_view detail = {}) const;
  void trace_route(Effects& fx, const RouteEntry& e,
                   std::string_view reason) const;

  NodeState state_;
  ProtocolParams params_;
  const CryptoSuite* crypto_;
  Rng chain_rng_;
  Rng jitter_rng_;
};

}  // namespace manet
