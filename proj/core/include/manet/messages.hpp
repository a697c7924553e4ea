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
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace manet {

using NodeId = std::uint32_t;
using SeqNum = std::uint32_t;
using Bytes = std::vector<std::uint8_t>;

/// Destination address of a one-hop broadcast.
inline constexpr NodeId kBroadcast = 0xFFFFFFFFu;
/// Placeholder for "no node" in optional address fields.
inline constexpr NodeId kNoNode = 0xFFFFFFFEu;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class SignatureKind : std::uint8_t { kSingle = 1, kDouble = 2 };

/// Signature over the non-mutable fields of a routing message plus the
/// hash-chain pair protecting its hop count.
///
/// `hash` and `signature` are mutable as far as the signed image is
/// concerned: the former changes at every hop, the latter cannot cover
/// itself. `dest_reply` is only populated for kDouble and carries the full
/// wire encoding of the destination-signed reply the intermediate cached.
struct SecurityExtension {
  Bytes signature;
  Bytes hash;
  Bytes top_hash;
  std::uint32_t max_hop_count = 0;
  NodeId signer = 0;
  SignatureKind sig_kind = SignatureKind::kSingle;
  Bytes dest_reply;

  bool operator==(const SecurityExtension&) const = default;
};

struct Rreq {
  NodeId src = 0;
  SeqNum src_seq = 0;
  std::uint32_t broadcast_id = 0;
  NodeId dst = 0;
  SeqNum dst_seq = 0;
  std::uint32_t hop_count = 0;
  std::uint32_t ttl = 0;
  std::optional<SecurityExtension> security;

  bool operator==(const Rreq&) const = default;
};

struct Rrep {
  NodeId originator = 0;
  NodeId dst = 0;
  SeqNum dst_seq = 0;
  std::uint32_t hop_count = 0;
  double lifetime = 0.0;
  // Mutable: the transmitting node's own next hop toward `dst`, so the
  // receiver learns the second hop of the route it installs.
  NodeId sender_next_hop = kNoNode;
  std::optional<SecurityExtension> security;

  bool operator==(const Rrep&) const = default;
};

struct Rerr {
  std::vector<std::pair<NodeId, SeqNum>> unreachable;

  bool operator==(const Rerr&) const = default;
};

struct DataPacket {
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t flow_id = 0;
  std::uint32_t packet_seq = 0;
  std::uint32_t payload_bytes = 512;
  double sent_at = 0.0;
  // Mutable hop budget; guards against forwarding loops on stale routes.
  std::uint32_t ttl = 0;

  bool operator==(const DataPacket&) const = default;
};

struct AckPacket {
  NodeId dst_of_data = 0;
  NodeId src_of_data = 0;
  std::uint32_t flow_id = 0;
  std::uint32_t packet_seq = 0;

  bool operator==(const AckPacket&) const = default;
};

struct AlarmPacket {
  NodeId accuser = 0;
  NodeId accused = 0;
  std::optional<SecurityExtension> security;

  bool operator==(const AlarmPacket&) const = default;
};

struct FidelityExchange {
  NodeId sender = 0;
  std::map<NodeId, std::int32_t> entries;

  bool operator==(const FidelityExchange&) const = default;
};

using RoutingMessage = std::variant<Rreq, Rrep, Rerr, DataPacket, AckPacket,
                                    AlarmPacket, FidelityExchange>;

/// One-byte type tags of the canonical encoding.
enum class MessageType : std::uint8_t {
  kRreq = 1,
  kRrep = 2,
  kRerr = 3,
  kData = 4,
  kAck = 5,
  kAlarm = 6,
  kFidelity = 7,
};

MessageType message_type(const RoutingMessage& msg);
std::string_view message_type_name(MessageType type);

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic big-endian encoding: a type tag followed by the fields in
/// declaration order. With `include_mutable` false the image omits hop
/// counts, TTLs, the chain `hash`, the signature, and `sender_next_hop`;
/// this is the byte string signatures are computed over.
Bytes canonical_bytes(const RoutingMessage& msg, bool include_mutable);

/// Inverse of canonical_bytes(msg, true).
RoutingMessage decode(std::span<const std::uint8_t> bytes);

/// Size on the air used for transmission delay. Data packets count their
/// payload; control packets count their encoding.
std::size_t wire_size(const RoutingMessage& msg);

/// Identity of a data packet end to end.
struct PacketKey {
  NodeId src = 0;
  std::uint32_t flow_id = 0;
  std::uint32_t packet_seq = 0;

  auto operator<=>(const PacketKey&) const = default;
};

PacketKey key_of(const DataPacket& pkt);
PacketKey key_of(const AckPacket& ack);

/// Short textual key used in traces, e.g. "d:3:1:17" or "q:4:2".
std::string trace_key(const RoutingMessage& msg);
std::string trace_key(const PacketKey& key);

const std::optional<SecurityExtension>* security_of(const RoutingMessage& msg);
std::optional<SecurityExtension>* security_of(RoutingMessage& msg);

// ---------------------------------------------------------------------------
// Routing table

enum class RouteState : std::uint8_t { kUp, kDown };

struct RouteEntry {
  NodeId dst = 0;
  SeqNum dst_seq = 0;
  NodeId next_hop = kNoNode;
  std::uint32_t hop_count = 0;
  std::set<NodeId> precursors;
  double expires_at = 0.0;
  RouteState state = RouteState::kDown;
  // Next hop of `next_hop` toward dst when the reply revealed it.
  NodeId second_hop = kNoNode;

  bool valid_at(double now) const {
    return state == RouteState::kUp && expires_at > now;
  }
  bool operator==(const RouteEntry&) const = default;
};

/// Why a candidate route replaced (or failed to replace) the current entry.
enum class RouteDecision : std::uint8_t {
  kRejected,
  kNew,       // no entry existed
  kRepair,    // entry existed but was DOWN or expired
  kFresher,   // strictly newer destination sequence number
  kShorter,   // equal sequence number, strictly fewer hops
};

std::string_view route_decision_name(RouteDecision d);

/// The reply-update rule: add if absent, replace if the candidate carries a
/// strictly newer sequence number or the same one with strictly fewer hops.
/// Invalid entries are replaced by any candidate that is not older.
RouteDecision compare_route(const RouteEntry* current, SeqNum seq,
                            std::uint32_t hop_count, double now);

class RouteTable {
 public:
  /// UP and unexpired entry for dst, if any.
  std::optional<RouteEntry> lookup(NodeId dst, double now) const;

  const RouteEntry* find(NodeId dst) const;
  RouteEntry* find(NodeId dst);

  /// Applies compare_route and installs the candidate when it wins. Precursor
  /// sets survive replacement.
  RouteDecision offer(const RouteEntry& candidate, double now);

  void erase(NodeId dst) { entries_.erase(dst); }
  const std::map<NodeId, RouteEntry>& entries() const { return entries_; }
  std::map<NodeId, RouteEntry>& entries() { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<NodeId, RouteEntry> entries_;
};

std::optional<RouteEntry> route_table_lookup(const RouteTable& table,
                                             NodeId dst, double now);

}  // namespace manet
