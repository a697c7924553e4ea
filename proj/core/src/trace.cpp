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
#include "manet/trace.hpp"

#include <array>
#include <cstdio>
#include <stdexcept>

namespace manet {
namespace {

constexpr std::array<std::string_view, 9> kKindNames = {
    "generate", "send",        "receive", "deliver",   "drop",
    "route",    "fidelity",    "eliminate", "in_flight"};

void append_number(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  out += buf;
}

void append_string(std::string& out, std::string_view s) {
  out += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

}  // namespace

std::string_view event_kind_name(EventKind k) {
  return kKindNames[static_cast<std::size_t>(k)];
}

EventKind parse_event_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  throw std::invalid_argument("unknown trace event kind: " + std::string(name));
}

bool is_data_key(std::string_view key) { return key.starts_with("d:"); }

std::string format_trace_line(const TraceEvent& e) {
  std::string out = "{\"t\":";
  append_number(out, e.time);
  out += ",\"node\":" + std::to_string(e.node);
  out += ",\"ev\":";
  append_string(out, event_kind_name(e.kind));
  out += ",\"key\":";
  append_string(out, e.key);
  if (e.peer != kNoNode) out += ",\"peer\":" + std::to_string(e.peer);
  if (e.next_hop != kNoNode) out += ",\"via\":" + std::to_string(e.next_hop);
  if (!e.reason.empty()) {
    out += ",\"reason\":";
    append_string(out, e.reason);
  }
  if (!e.detail.empty()) {
    out += ",\"detail\":";
    append_string(out, e.detail);
  }
  if (e.value != 0) out += ",\"v\":" + std::to_string(e.value);
  if (e.value2 != 0) out += ",\"v2\":" + std::to_string(e.value2);
  if (e.kind == EventKind::kDeliver) {
    out += ",\"latency\":";
    append_number(out, e.latency);
  }
  out += '}';
  return out;
}

void NdjsonTraceWriter::record(const TraceEvent& e) {
  out_ << format_trace_line(e) << '\n';
}

}  // namespace manet
