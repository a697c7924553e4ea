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

#include "manet/messages.hpp"

#include <bit>
#include <cstring>

namespace manet {
namespace {

class Writer {
 public:
  explicit Writer(bool include_mutable) : include_mutable_(include_mutable) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
      out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
  }
  void u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
      out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const Bytes& b) {
    if (b.size() > 0xFFFF) throw std::length_error("byte field too long");
    u16(static_cast<std::uint16_t>(b.size()));
    out_.insert(out_.end(), b.begin(), b.end());
  }

  // Mutable fields are written only into the full wire image.
  void mutable_u32(std::uint32_t v) {
    if (include_mutable_) u32(v);
  }
  void mutable_bytes(const Bytes& b) {
    if (include_mutable_) bytes(b);
  }

  void security(const std::optional<SecurityExtension>& ext) {
    u8(ext ? 1 : 0);
    if (!ext) return;
    mutable_bytes(ext->signature);
    mutable_bytes(ext->hash);
    bytes(ext->top_hash);
    u32(ext->max_hop_count);
    u32(ext->signer);
    u8(static_cast<std::uint8_t>(ext->sig_kind));
    bytes(ext->dest_reply);
  }

  Bytes take() { return std::move(out_); }

 private:
  bool include_mutable_;
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  Bytes bytes() {
    std::size_t n = u16();
    need(n);
    Bytes b(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
            in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return b;
  }

  std::optional<SecurityExtension> security() {
    std::uint8_t present = u8();
    if (present == 0) return std::nullopt;
    if (present != 1) throw DecodeError("bad security presence flag");
    SecurityExtension ext;
    ext.signature = bytes();
    ext.hash = bytes();
    ext.top_hash = bytes();
    ext.max_hop_count = u32();
    ext.signer = u32();
    std::uint8_t kind = u8();
    if (kind != 1 && kind != 2) throw DecodeError("bad signature kind");
    ext.sig_kind = static_cast<SignatureKind>(kind);
    ext.dest_reply = bytes();
    return ext;
  }

  void finish() const {
    if (pos_ != in_.size()) throw DecodeError("trailing bytes after message");
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw DecodeError("truncated message");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

MessageType message_type(const RoutingMessage& msg) {
  return std::visit(
      Overloaded{
          [](const Rreq&) { return MessageType::kRreq; },
          [](const Rrep&) { return MessageType::kRrep; },
          [](const Rerr&) { return MessageType::kRerr; },
          [](const DataPacket&) { return MessageType::kData; },
          [](const AckPacket&) { return MessageType::kAck; },
          [](const AlarmPacket&) { return MessageType::kAlarm; },
          [](const FidelityExchange&) { return MessageType::kFidelity; },
      },
      msg);
}

std::string_view message_type_name(MessageType type) {
  switch (type) {
    case MessageType::kRreq: return "RREQ";
    case MessageType::kRrep: return "RREP";
    case MessageType::kRerr: return "RERR";
    case MessageType::kData: return "DATA";
    case MessageType::kAck: return "ACK";
    case MessageType::kAlarm: return "ALARM";
    case MessageType::kFidelity: return "FIDELITY";
  }
  return "?";
}

Bytes canonical_bytes(const RoutingMessage& msg, bool include_mutable) {
  Writer w(include_mutable);
  w.u8(static_cast<std::uint8_t>(message_type(msg)));
  std::visit(Overloaded{
                 [&](const Rreq& m) {
                   w.u32(m.src);
                   w.u32(m.src_seq);
                   w.u32(m.broadcast_id);
                   w.u32(m.dst);
                   w.u32(m.dst_seq);
                   w.mutable_u32(m.hop_count);
                   w.mutable_u32(m.ttl);
                   w.security(m.security);
                 },
                 [&](const Rrep& m) {
                   w.u32(m.originator);
                   w.u32(m.dst);
                   w.u32(m.dst_seq);
                   w.mutable_u32(m.hop_count);
                   w.f64(m.lifetime);
                   w.mutable_u32(m.sender_next_hop);
                   w.security(m.security);
                 },
                 [&](const Rerr& m) {
                   w.u16(static_cast<std::uint16_t>(m.unreachable.size()));
                   for (const auto& [node, seq] : m.unreachable) {
                     w.u32(node);
                     w.u32(seq);
                   }
                 },
                 [&](const DataPacket& m) {
                   w.u32(m.src);
                   w.u32(m.dst);
                   w.u32(m.flow_id);
                   w.u32(m.packet_seq);
                   w.u32(m.payload_bytes);
                   w.f64(m.sent_at);
                   w.mutable_u32(m.ttl);
                 },
                 [&](const AckPacket& m) {
                   w.u32(m.dst_of_data);
                   w.u32(m.src_of_data);
                   w.u32(m.flow_id);
                   w.u32(m.packet_seq);
                 },
                 [&](const AlarmPacket& m) {
                   w.u32(m.accuser);
                   w.u32(m.accused);
                   w.security(m.security);
                 },
                 [&](const FidelityExchange& m) {
                   w.u32(m.sender);
                   w.u16(static_cast<std::uint16_t>(m.entries.size()));
                   for (const auto& [node, level] : m.entries) {
                     w.u32(node);
                     w.i32(level);
                   }
                 },
             },
             msg);
  return w.take();
}

RoutingMessage decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto tag = static_cast<MessageType>(r.u8());
  RoutingMessage out;
  switch (tag) {
    case MessageType::kRreq: {
      Rreq m;
      m.src = r.u32();
      m.src_seq = r.u32();
      m.broadcast_id = r.u32();
      m.dst = r.u32();
      m.dst_seq = r.u32();
      m.hop_count = r.u32();
      m.ttl = r.u32();
      m.security = r.security();
      out = std::move(m);
      break;
    }
    case MessageType::kRrep: {
      Rrep m;
      m.originator = r.u32();
      m.dst = r.u32();
      m.dst_seq = r.u32();
      m.hop_count = r.u32();
      m.lifetime = r.f64();
      m.sender_next_hop = r.u32();
      m.security = r.security();
      out = std::move(m);
      break;
    }
    case MessageType::kRerr: {
      Rerr m;
      std::size_t n = r.u16();
      for (std::size_t i = 0; i < n; ++i) {
        NodeId node = r.u32();
        SeqNum seq = r.u32();
        m.unreachable.emplace_back(node, seq);
      }
      out = std::move(m);
      break;
    }
    case MessageType::kData: {
      DataPacket m;
      m.src = r.u32();
      m.dst = r.u32();
      m.flow_id = r.u32();
      m.packet_seq = r.u32();
      m.payload_bytes = r.u32();
      m.sent_at = r.f64();
      m.ttl = r.u32();
      out = m;
      break;
    }
    case MessageType::kAck: {
      AckPacket m;
      m.dst_of_data = r.u32();
      m.src_of_data = r.u32();
      m.flow_id = r.u32();
      m.packet_seq = r.u32();
      out = m;
      break;
    }
    case MessageType::kAlarm: {
      AlarmPacket m;
      m.accuser = r.u32();
      m.accused = r.u32();
      m.security = r.security();
      out = std::move(m);
      break;
    }
    case MessageType::kFidelity: {
      FidelityExchange m;
      m.sender = r.u32();
      std::size_t n = r.u16();
      for (std::size_t i = 0; i < n; ++i) {
        NodeId node = r.u32();
        m.entries[node] = r.i32();
      }
      out = std::move(m);
      break;
    }
    default:
      throw DecodeError("unknown message type tag");
  }
  r.finish();
  return out;
}

std::size_t wire_size(const RoutingMessage& msg) {
  if (const auto* data = std::get_if<DataPacket>(&msg)) {
    return data->payload_bytes;
  }
  return canonical_bytes(msg, true).size();
}

PacketKey key_of(const DataPacket& pkt) {
  return {pkt.src, pkt.flow_id, pkt.packet_seq};
}

PacketKey key_of(const AckPacket& ack) {
  return {ack.src_of_data, ack.flow_id, ack.packet_seq};
}

std::string trace_key(const PacketKey& key) {
  return "d:" + std::to_string(key.src) + ":" + std::to_string(key.flow_id) +
         ":" + std::to_string(key.packet_seq);
}

std::string trace_key(const RoutingMessage& msg) {
  return std::visit(
      Overloaded{
          [](const Rreq& m) {
            return "q:" + std::to_string(m.src) + ":" +
                   std::to_string(m.broadcast_id);
          },
          [](const Rrep& m) {
            return "p:" + std::to_string(m.originator) + ":" +
                   std::to_string(m.dst) + ":" + std::to_string(m.dst_seq);
          },
          [](const Rerr& m) {
            return "e:" + std::to_string(m.unreachable.size());
          },
          [](const DataPacket& m) { return trace_key(key_of(m)); },
          [](const AckPacket& m) {
            return "a:" + std::to_string(m.src_of_data) + ":" +
                   std::to_string(m.flow_id) + ":" +
                   std::to_string(m.packet_seq);
          },
          [](const AlarmPacket& m) {
            return "x:" + std::to_string(m.accuser) + ":" +
                   std::to_string(m.accused);
          },
          [](const FidelityExchange& m) {
            return "f:" + std::to_string(m.sender);
          },
      },
      msg);
}

const std::optional<SecurityExtension>* security_of(const RoutingMessage& msg) {
  if (const auto* m = std::get_if<Rreq>(&msg)) return &m->security;
  if (const auto* m = std::get_if<Rrep>(&msg)) return &m->security;
  if (const auto* m = std::get_if<AlarmPacket>(&msg)) return &m->security;
  return nullptr;
}

std::optional<SecurityExtension>* security_of(RoutingMessage& msg) {
  if (auto* m = std::get_if<Rreq>(&msg)) return &m->security;
  if (auto* m = std::get_if<Rrep>(&msg)) return &m->security;
  if (auto* m = std::get_if<AlarmPacket>(&msg)) return &m->security;
  return nullptr;
}

// ---------------------------------------------------------------------------

std::string_view route_decision_name(RouteDecision d) {
  switch (d) {
    case RouteDecision::kRejected: return "rejected";
    case RouteDecision::kNew: return "new";
    case RouteDecision::kRepair: return "repair";
    case RouteDecision::kFresher: return "fresher";
    case RouteDecision::kShorter: return "shorter";
  }
  return "?";
}

RouteDecision compare_route(const RouteEntry* current, SeqNum seq,
                            std::uint32_t hop_count, double now) {
  if (current == nullptr) return RouteDecision::kNew;
  if (!current->valid_at(now)) {
    return seq >= current->dst_seq ? RouteDecision::kRepair
                                   : RouteDecision::kRejected;
  }
  if (seq > current->dst_seq) return RouteDecision::kFresher;
  if (seq == current->dst_seq && hop_count < current->hop_count) {
    return RouteDecision::kShorter;
  }
  return RouteDecision::kRejected;
}

std::optional<RouteEntry> RouteTable::lookup(NodeId dst, double now) const {
  const RouteEntry* e = find(dst);
  if (e == nullptr || !e->valid_at(now)) return std::nullopt;
  return *e;
}

const RouteEntry* RouteTable::find(NodeId dst) const {
  auto it = entries_.find(dst);
  return it == entries_.end() ? nullptr : &it->second;
}

RouteEntry* RouteTable::find(NodeId dst) {
  auto it = entries_.find(dst);
  return it == entries_.end() ? nullptr : &it->second;
}

RouteDecision RouteTable::offer(const RouteEntry& candidate, double now) {
  RouteEntry* current = find(candidate.dst);
  RouteDecision d =
      compare_route(current, candidate.dst_seq, candidate.hop_count, now);
  if (d == RouteDecision::kRejected) return d;
  if (current == nullptr) {
    RouteEntry e = candidate;
    e.state = RouteState::kUp;
    entries_.emplace(e.dst, std::move(e));
  } else {
    std::set<NodeId> precursors = std::move(current->precursors);
    *current = candidate;
    current->state = RouteState::kUp;
    current->precursors.insert(precursors.begin(), precursors.end());
  }
  return d;
}

std::optional<RouteEntry> route_table_lookup(const RouteTable& table,
                                             NodeId dst, double now) {
  return table.lookup(dst, now);
}

}  // namespace manet
