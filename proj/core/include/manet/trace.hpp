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
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "manet/messages.hpp"

namespace manet {

enum class EventKind : std::uint8_t {
  kGenerate,        // data packet created at its source
  kSend,            // packet handed to the radio
  kReceive,         // packet arrived at a node
  kDeliver,         // data packet reached its destination
  kDrop,            // packet discarded; reason says why
  kRouteUpdate,     // routing-table mutation
  kFidelityUpdate,  // fidelity level changed
  kElimination,     // node blacklisted (own detection or alarm)
  kInFlight,        // end-of-run count of data packets still in the network
};

std::string_view event_kind_name(EventKind k);
EventKind parse_event_kind(std::string_view name);

/// Data-packet drop reasons; these are the only ones that count as loss.
namespace drop {
inline constexpr std::string_view kBlackhole = "blackhole";
inline constexpr std::string_view kNoRoute = "no_route";
inline constexpr std::string_view kGate = "gate";
}  // namespace drop

/// One trace record. Which optional fields are meaningful depends on kind:
///   send/receive: peer = to/from, reason = message type
///   deliver:      value = payload bytes, latency = receive - send time
///   drop:         reason, detail
///   route_update: peer = destination, value = seq, value2 = hops,
///                 next_hop, reason = route decision or "down"
///   fidelity:     peer = subject, value = new level, value2 = delta
///   elimination:  peer = accused, reason = "detected" or "alarm"
///   in_flight:    value = count
struct TraceEvent {
  double time = 0.0;
  NodeId node = kNoNode;
  EventKind kind = EventKind::kSend;
  std::string key;
  NodeId peer = kNoNode;
  NodeId next_hop = kNoNode;
  std::string reason;
  std::string detail;
  std::int64_t value = 0;
  std::int64_t value2 = 0;
  double latency = 0.0;
};

bool is_data_key(std::string_view key);

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void record(const TraceEvent& e) = 0;
};

/// Newline-delimited JSON, one object per event, fixed field order and
/// fixed float formatting so identical runs produce identical bytes.
class NdjsonTraceWriter : public TraceSink {
 public:
  explicit NdjsonTraceWriter(std::ostream& out) : out_(out) {}
  void record(const TraceEvent& e) override;

 private:
  std::ostream& out_;
};

class VectorTraceSink : public TraceSink {
 public:
  void record(const TraceEvent& e) override { events.push_back(e); }
  std::vector<TraceEvent> events;
};

std::string format_trace_line(const TraceEvent& e);

}  // namespace manet
