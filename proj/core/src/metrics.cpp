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

#include "manet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace manet {
namespace {

std::size_t bucket_count(double sim_time, double width) {
  const double n = std::ceil(sim_time / width - 1e-9);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

// Times and latencies are stored in the trace at nanosecond resolution; the
// online collector rounds the same way so both paths fold identical inputs.
double quantize(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return std::strtod(buf, nullptr);
}

bool is_counted_drop(std::string_view reason) {
  return reason == drop::kBlackhole || reason == drop::kNoRoute ||
         reason == drop::kGate;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

}  // namespace

std::optional<double> end_to_end_delay(
    std::span<const std::pair<double, double>> delivered) {
  if (delivered.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& [sent, received] : delivered) sum += received - sent;
  return sum / static_cast<double>(delivered.size());
}

double throughput(std::uint64_t bytes, double bucket_width) {
  if (bucket_width <= 0) throw std::invalid_argument("bucket width must be positive");
  return 8.0 * static_cast<double>(bytes) / bucket_width;
}

std::uint64_t packet_loss(std::uint64_t generated, std::uint64_t received) {
  return generated >= received ? generated - received : 0;
}

double RunSummary::delivery_ratio() const {
  return generated == 0 ? 0.0
                        : static_cast<double>(delivered) / static_cast<double>(generated);
}

double RunSummary::throughput_bps() const {
  return sim_time > 0 ? throughput(delivered_bytes, sim_time) : 0.0;
}

bool conservation_holds(const RunSummary& s) {
  return s.dropped_other == 0 &&
         s.generated == s.delivered + s.dropped_blackhole + s.dropped_no_route +
                            s.dropped_gate + s.in_flight_at_end;
}

// ---------------------------------------------------------------------------

MetricsCollector::MetricsCollector(double sim_time, double bucket_width)
    : width_(bucket_width), buckets_(bucket_count(sim_time, bucket_width)) {
  if (bucket_width <= 0) throw std::invalid_argument("bucket width must be positive");
  summary_.sim_time = sim_time;
}

std::size_t MetricsCollector::bucket_of(double t) const {
  const double b = std::floor(t / width_);
  if (b <= 0) return 0;
  return std::min(buckets_.size() - 1, static_cast<std::size_t>(b));
}

void MetricsCollector::record(const TraceEvent& e) {
  switch (e.kind) {
    case EventKind::kGenerate:
      if (!is_data_key(e.key)) return;
      ++summary_.generated;
      ++buckets_[bucket_of(quantize(e.time))].sent;
      return;
    case EventKind::kDeliver: {
      Bucket& b = buckets_[bucket_of(quantize(e.time))];
      const double latency = quantize(e.latency);
      ++summary_.delivered;
      summary_.delivered_bytes += static_cast<std::uint64_t>(e.value);
      delay_sum_ += latency;
      summary_.mean_delay_s = delay_sum_ / static_cast<double>(summary_.delivered);
      ++b.delivered;
      b.bytes += static_cast<std::uint64_t>(e.value);
      b.delay_sum += latency;
      return;
    }
    case EventKind::kDrop:
      if (!is_data_key(e.key)) return;
      if (e.reason == drop::kBlackhole) {
        ++summary_.dropped_blackhole;
      } else if (e.reason == drop::kNoRoute) {
        ++summary_.dropped_no_route;
      } else if (e.reason == drop::kGate) {
        ++summary_.dropped_gate;
      } else {
        ++summary_.dropped_other;
      }
      if (is_counted_drop(e.reason)) ++buckets_[bucket_of(quantize(e.time))].lost;
      return;
    case EventKind::kInFlight:
      summary_.in_flight_at_end += static_cast<std::uint64_t>(e.value);
      buckets_.back().lost += static_cast<std::uint64_t>(e.value);
      return;
    case EventKind::kElimination:
      ++summary_.eliminations;
      return;
    default:
      return;
  }
}

MetricsSeries MetricsCollector::series() const {
  MetricsSeries s;
  s.bucket_width = width_;
  std::uint64_t sent = 0, lost = 0, delivered = 0;
  for (std::size_t i = 0; i < buckets_.size(); ++i) {
    const Bucket& b = buckets_[i];
    sent += b.sent;
    lost += b.lost;
    delivered += b.delivered;
    MetricsRow row;
    row.t = width_ * static_cast<double>(i + 1);
    if (b.delivered > 0) row.mean_delay_s = b.delay_sum / static_cast<double>(b.delivered);
    row.throughput_bps = throughput(b.bytes, width_);
    row.cum_lost = lost;
    row.cum_sent = sent;
    row.delivery_ratio =
        sent == 0 ? 0.0 : std::min(1.0, static_cast<double>(delivered) / static_cast<double>(sent));
    s.rows.push_back(row);
  }
  return s;
}

// ---------------------------------------------------------------------------

ReducedMetrics reduce_trace(std::istream& ndjson, double sim_time, double bucket_width) {
  struct DataEvent {
    double t;
    char what;  // 'g'enerate, 'd'eliver, 'l'ost
    std::uint64_t bytes;
    double latency;
  };
  std::vector<DataEvent> events;
  ReducedMetrics out;
  RunSummary& sum = out.summary;
  sum.sim_time = sim_time;
  std::uint64_t in_flight = 0;
  double delay_total = 0.0;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ndjson, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
    }
    const std::string ev = j.at("ev").get<std::string>();
    const std::string key = j.value("key", "");
    const double t = j.at("t").get<double>();
    const std::int64_t v = j.value("v", std::int64_t{0});
    if (ev == "in_flight") {
      in_flight += static_cast<std::uint64_t>(v);
    } else if (ev == "eliminate") {
      ++sum.eliminations;
    } else if (ev == "generate" && key.starts_with("d:")) {
      ++sum.generated;
      events.push_back({t, 'g', 0, 0.0});
    } else if (ev == "deliver") {
      const double latency = j.at("latency").get<double>();
      ++sum.delivered;
      sum.delivered_bytes += static_cast<std::uint64_t>(v);
      delay_total += latency;
      events.push_back({t, 'd', static_cast<std::uint64_t>(v), latency});
    } else if (ev == "drop" && key.starts_with("d:")) {
      const std::string reason = j.value("reason", "");
      if (reason == "blackhole") {
        ++sum.dropped_blackhole;
      } else if (reason == "no_route") {
        ++sum.dropped_no_route;
      } else if (reason == "gate") {
        ++sum.dropped_gate;
      } else {
        ++sum.dropped_other;
        continue;
      }
      events.push_back({t, 'l', 0, 0.0});
    }
  }
  sum.in_flight_at_end = in_flight;
  if (sum.delivered > 0) sum.mean_delay_s = delay_total / static_cast<double>(sum.delivered);

  const std::size_t n = bucket_count(sim_time, bucket_width);
  out.series.bucket_width = bucket_width;
  std::uint64_t cum_sent = 0, cum_lost = 0, cum_delivered = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bytes = 0, delivered = 0;
    double delay = 0.0;
    for (const DataEvent& e : events) {
      std::size_t b = e.t <= 0 ? 0 : static_cast<std::size_t>(std::floor(e.t / bucket_width));
      if (b >= n) b = n - 1;
      if (b != i) continue;
      if (e.what == 'g') ++cum_sent;
      if (e.what == 'l') ++cum_lost;
      if (e.what == 'd') {
        ++delivered;
        bytes += e.bytes;
        delay += e.latency;
      }
    }
    cum_delivered += delivered;
    if (i + 1 == n) cum_lost += in_flight;
    MetricsRow row;
    row.t = bucket_width * static_cast<double>(i + 1);
    if (delivered > 0) row.mean_delay_s = delay / static_cast<double>(delivered);
    row.throughput_bps = 8.0 * static_cast<double>(bytes) / bucket_width;
    row.cum_lost = cum_lost;
    row.cum_sent = cum_sent;
    row.delivery_ratio = cum_sent == 0 ? 0.0
                                       : std::min(1.0, static_cast<double>(cum_delivered) /
                                                           static_cast<double>(cum_sent));
    out.series.rows.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------

void write_metrics_csv(std::ostream& out, const MetricsSeries& series) {
  out << "t,mean_delay_s,throughput_bps,cum_lost,cum_sent,delivery_ratio\n";
  for (const MetricsRow& r : series.rows) {
    out << fmt(r.t) << ',' << fmt_opt(r.mean_delay_s) << ',' << fmt(r.throughput_bps)
        << ',' << r.cum_lost << ',' << r.cum_sent << ',' << fmt(r.delivery_ratio) << '\n';
  }
}

MetricsSeries read_metrics_csv(std::istream& in) {
  MetricsSeries s;
  std::string line;
  if (!std::getline(in, line) ||
      line != "t,mean_delay_s,throughput_bps,cum_lost,cum_sent,delivery_ratio") {
    throw std::runtime_error("metrics csv: unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 5) cells.emplace_back();  // trailing empty cell
    if (cells.size() != 6) throw std::runtime_error("metrics csv: bad row '" + line + "'");
    MetricsRow r;
    r.t = std::stod(cells[0]);
    if (!cells[1].empty()) r.mean_delay_s = std::stod(cells[1]);
    r.throughput_bps = std::stod(cells[2]);
    r.cum_lost = std::stoull(cells[3]);
    r.cum_sent = std::stoull(cells[4]);
    r.delivery_ratio = std::stod(cells[5]);
    s.rows.push_back(r);
  }
  if (s.rows.size() >= 2) s.bucket_width = s.rows[1].t - s.rows[0].t;
  else if (s.rows.size() == 1) s.bucket_width = s.rows[0].t;
  return s;
}

void write_summary(std::ostream& out, const RunSummary& s) {
  out << "sim_time_s=" << fmt(s.sim_time) << '\n'
      << "generated=" << s.generated << '\n'
      << "delivered=" << s.delivered << '\n'
      << "lost=" << s.lost() << '\n'
      << "dropped_blackhole=" << s.dropped_blackhole << '\n'
      << "dropped_no_route=" << s.dropped_no_route << '\n'
      << "dropped_gate=" << s.dropped_gate << '\n'
      << "dropped_other=" << s.dropped_other << '\n'
      << "in_flight_at_end=" << s.in_flight_at_end << '\n'
      << "delivery_ratio=" << fmt(s.delivery_ratio()) << '\n'
      << "mean_delay_s=" << (s.mean_delay_s ? fmt(*s.mean_delay_s) : "NA") << '\n'
      << "throughput_bps=" << fmt(s.throughput_bps()) << '\n'
      << "eliminations=" << s.eliminations << '\n'
      << "conservation=" << (conservation_holds(s) ? "ok" : "violated") << '\n';
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace manet
