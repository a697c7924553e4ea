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
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "manet/scenario.hpp"
#include "manet/simulator.hpp"

namespace manet {

/// Runs one scenario and writes manifest.txt, trace.ndjson (optional),
/// metrics.csv and summary.txt into `out_dir`, creating it if needed.
RunOutput run_single(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                     bool write_trace = true);

struct GridSpec {
  ScenarioConfig base;
  std::vector<EngineKind> protocols;
  std::vector<std::uint32_t> attacker_counts;
  std::vector<std::uint64_t> seeds;
  unsigned parallelism = 0;  // 0: one worker per hardware thread
  bool write_traces = false;

  /// Throws ConfigError on empty lists or an invalid base config.
  void validate() const;
};

struct CellResult {
  EngineKind protocol = EngineKind::kAodv;
  std::uint32_t attackers = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunOutput output;
};

struct GridResult {
  std::vector<CellResult> cells;  // protocol-major, then attackers, then seed
};

/// Runs every (protocol, attackers, seed) cell. A failing cell is recorded
/// and the rest still run. With `out_dir`, each cell gets its own
/// subdirectory under cells/ and the aggregates are written at the top.
GridResult run_grid(const GridSpec& spec,
                    const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                    const std::function<void(const CellResult&)>& on_done = {});

/// Mean and sample standard deviation; std is 0 for fewer than two values.
struct Stat {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};
Stat describe(const std::vector<double>& values);

struct AggregateRow {
  EngineKind protocol = EngineKind::kAodv;
  std::uint32_t attackers = 0;
  std::size_t runs = 0;
  std::size_t failed = 0;
  Stat loss;           // packets, at end of run
  Stat throughput;     // bit/s over the whole run
  Stat delay;          // s, runs without deliveries excluded
  Stat delivery_ratio;
};

std::vector<AggregateRow> aggregate(const GridResult& grid);

/// Columns: protocol, attackers, runs, failed, then mean/std pairs for
/// loss_packets, throughput_bps, mean_delay_s, delivery_ratio.
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

/// Per-bucket means across seeds. Columns: protocol, attackers, t, then
/// mean/std pairs for mean_delay_s, throughput_bps, cum_lost,
/// delivery_ratio.
void write_aggregate_series_csv(std::ostream& out, const GridResult& grid);

}  // namespace manet
