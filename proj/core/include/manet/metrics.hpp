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
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "manet/trace.hpp"

namespace manet {

/// Mean of (received_at - sent_at); nullopt for an empty set.
std::optional<double> end_to_end_delay(
    std::span<const std::pair<double, double>> delivered);

/// Bits per second for `bytes` delivered within one bucket.
double throughput(std::uint64_t bytes, double bucket_width);

std::uint64_t packet_loss(std::uint64_t generated, std::uint64_t received);

/// One bucket of the time series. `t` is the bucket's right edge.
struct MetricsRow {
  double t = 0.0;
  std::optional<double> mean_delay_s;
  double throughput_bps = 0.0;
  std::uint64_t cum_lost = 0;
  std::uint64_t cum_sent = 0;
  double delivery_ratio = 0.0;

  bool operator==(const MetricsRow&) const = default;
};

struct MetricsSeries {
  double bucket_width = 1.0;
  std::vector<MetricsRow> rows;

  bool operator==(const MetricsSeries&) const = default;
};

struct RunSummary {
  double sim_time = 0.0;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t delivered_bytes = 0;
  std::uint64_t dropped_blackhole = 0;
  std::uint64_t dropped_no_route = 0;
  std::uint64_t dropped_gate = 0;
  std::uint64_t dropped_other = 0;  // any other reason; breaks conservation
  std::uint64_t in_flight_at_end = 0;
  std::uint64_t eliminations = 0;
  std::optional<double> mean_delay_s;

  std::uint64_t lost() const { return packet_loss(generated, delivered); }
  double delivery_ratio() const;
  double throughput_bps() const;

  bool operator==(const RunSummary&) const = default;
};

/// generated = delivered + the three drop classes + in-flight, exactly.
bool conservation_holds(const RunSummary& s);

/// Folds trace events into the time series and summary as they happen.
class MetricsCollector : public TraceSink {
 public:
  MetricsCollector(double sim_time, double bucket_width);

  void record(const TraceEvent& e) override;

  MetricsSeries series() const;
  const RunSummary& summary() const { return summary_; }

 private:
  struct Bucket {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t lost = 0;
    std::uint64_t bytes = 0;
    double delay_sum = 0.0;
  };
  std::size_t bucket_of(double t) const;

  double width_;
  std::vector<Bucket> buckets_;
  RunSummary summary_;
  double delay_sum_ = 0.0;
};

struct ReducedMetrics {
  MetricsSeries series;
  RunSummary summary;
};

/// Recomputes metrics from an NDJSON trace, independently of the
/// collector. Throws std::runtime_error on a malformed line.
ReducedMetrics reduce_trace(std::istream& ndjson, double sim_time,
                            double bucket_width);

/// Columns: t, mean_delay_s, throughput_bps, cum_lost, cum_sent,
/// delivery_ratio. Units: s, s, bit/s, packets, packets, fraction. An empty
/// mean_delay_s cell means no delivery in that bucket.
void write_metrics_csv(std::ostream& out, const MetricsSeries& series);
MetricsSeries read_metrics_csv(std::istream& in);

void write_summary(std::ostream& out, const RunSummary& s);
std::map<std::string, std::string> read_key_values(std::istream& in);

}  // namespace manet
