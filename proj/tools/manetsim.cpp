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

// manetsim: run single scenarios or attacker-count grids and re-check
// their outputs.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "manet/experiment.hpp"
#include "manet/metrics.hpp"
#include "manet/scenario.hpp"
#include "manet/version.hpp"

namespace fs = std::filesystem;
using namespace manet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCheck = 3;

struct ScenarioOptions {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_scenario_options(CLI::App* cmd, ScenarioOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "Scenario file (INI)")
      ->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", opts.overrides,
                  "Override a setting, e.g. -s traffic.packet_rate=8 (repeatable)");
}

ScenarioConfig load(const ScenarioOptions& opts) {
  ScenarioConfig cfg = opts.config_path.empty() ? ScenarioConfig{}
                                                : load_scenario(opts.config_path);
  for (const auto& o : opts.overrides) apply_override(cfg, o);
  cfg.validate();
  return cfg;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char c : s + ",") {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (c != ' ') {
      item += c;
    }
  }
  return out;
}

// "1-20", "1,5,9" or a mix of both.
std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(s)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(std::stoull(item));
      continue;
    }
    const auto lo = std::stoull(item.substr(0, dash));
    const auto hi = std::stoull(item.substr(dash + 1));
    if (hi < lo) throw ConfigError({"seeds: empty range '" + item + "'"});
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-6 * std::max({1.0, std::abs(a), std::abs(b)});
}

int verify_run(const fs::path& dir) {
  const ScenarioConfig cfg = load_scenario((dir / "manifest.txt").string());
  std::ifstream trace(dir / "trace.ndjson");
  if (!trace) {
    std::cerr << "verify: " << (dir / "trace.ndjson") << " is missing\n";
    return kExitRuntime;
  }
  const ReducedMetrics reduced = reduce_trace(trace, cfg.sim_time, cfg.bucket_width);
  std::ifstream csv(dir / "metrics.csv");
  const MetricsSeries stored = read_metrics_csv(csv);

  int failures = 0;
  auto fail = [&failures](const std::string& msg) {
    std::cout << "FAIL " << msg << '\n';
    ++failures;
  };
  if (!conservation_holds(reduced.summary)) {
    fail("conservation: generated=" + std::to_string(reduced.summary.generated) +
         " delivered=" + std::to_string(reduced.summary.delivered) +
         " blackhole=" + std::to_string(reduced.summary.dropped_blackhole) +
         " no_route=" + std::to_string(reduced.summary.dropped_no_route) +
         " gate=" + std::to_string(reduced.summary.dropped_gate) +
         " other=" + std::to_string(reduced.summary.dropped_other) +
         " in_flight=" + std::to_string(reduced.summary.in_flight_at_end));
  }
  if (stored.rows.size() != reduced.series.rows.size()) {
    fail("metrics.csv has " + std::to_string(stored.rows.size()) + " rows, trace gives " +
         std::to_string(reduced.series.rows.size()));
  } else {
    for (std::size_t i = 0; i < stored.rows.size(); ++i) {
      const MetricsRow& a = stored.rows[i];
      const MetricsRow& b = reduced.series.rows[i];
      const bool delay_ok = a.mean_delay_s.has_value() == b.mean_delay_s.has_value() &&
                            (!a.mean_delay_s || close(*a.mean_delay_s, *b.mean_delay_s));
      if (!close(a.t, b.t) || !delay_ok || !close(a.throughput_bps, b.throughput_bps) ||
          a.cum_lost != b.cum_lost || a.cum_sent != b.cum_sent ||
          !close(a.delivery_ratio, b.delivery_ratio)) {
        fail("metrics.csv row " + std::to_string(i + 1) + " disagrees with the trace");
      }
    }
  }
  std::ifstream summary_file(dir / "summary.txt");
  const auto summary = read_key_values(summary_file);
  auto expect = [&](const std::string& key, std::uint64_t value) {
    auto it = summary.find(key);
    if (it == summary.end() || it->second != std::to_string(value)) {
      fail("summary " + key + " disagrees with the trace");
    }
  };
  expect("generated", reduced.summary.generated);
  expect("delivered", reduced.summary.delivered);
  expect("lost", reduced.summary.lost());
  expect("in_flight_at_end", reduced.summary.in_flight_at_end);

  if (failures == 0) {
    std::cout << "ok generated=" << reduced.summary.generated
              << " delivered=" << reduced.summary.delivered
              << " lost=" << reduced.summary.lost() << '\n';
    return kExitOk;
  }
  return kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event MANET simulator with black hole attackers"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  ScenarioOptions run_opts;
  std::string run_out;
  bool no_trace = false;
  auto* run = app.add_subcommand("run", "Run one scenario");
  add_scenario_options(run, run_opts);
  run->add_option("-o,--out", run_out, "Output directory")->required();
  run->add_flag("--no-trace", no_trace, "Skip trace.ndjson");

  ScenarioOptions grid_opts;
  std::string grid_out, protocols = "AODV,SAODV,PC_AODV_BH", attackers = "0,1,2,5",
                        seeds = "1-20";
  unsigned jobs = 0;
  bool grid_traces = false;
  auto* grid = app.add_subcommand("grid", "Run a protocol x attackers x seed grid");
  add_scenario_options(grid, grid_opts);
  grid->add_option("-o,--out", grid_out, "Output directory")->required();
  grid->add_option("--protocols", protocols, "Comma-separated engines")->capture_default_str();
  grid->add_option("--attackers", attackers, "Comma-separated attacker counts")
      ->capture_default_str();
  grid->add_option("--seeds", seeds, "Seeds, e.g. 1-20 or 3,7,11")->capture_default_str();
  grid->add_option("-j,--jobs", jobs, "Parallel runs (0 = all cores)");
  grid->add_flag("--traces", grid_traces, "Write trace.ndjson for every cell");

  std::string verify_dir;
  auto* verify = app.add_subcommand(
      "verify", "Recompute metrics from a run's trace and check them against its outputs");
  verify->add_option("dir", verify_dir, "Run output directory")->required()->check(
      CLI::ExistingDirectory);

  ScenarioOptions show_opts;
  auto* show = app.add_subcommand("config", "Print the effective scenario settings");
  add_scenario_options(show, show_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      const ScenarioConfig cfg = load(run_opts);
      const RunOutput out = run_single(cfg, run_out, !no_trace);
      write_summary(std::cout, out.summary);
      return conservation_holds(out.summary) ? kExitOk : kExitCheck;
    }
    if (*grid) {
      GridSpec spec;
      spec.base = load(grid_opts);
      for (const auto& p : split_list(protocols)) spec.protocols.push_back(parse_engine_kind(p));
      for (const auto& a : split_list(attackers)) {
        spec.attacker_counts.push_back(static_cast<std::uint32_t>(std::stoul(a)));
      }
      spec.seeds = parse_seed_list(seeds);
      spec.parallelism = jobs;
      spec.write_traces = grid_traces;
      const std::size_t total =
          spec.protocols.size() * spec.attacker_counts.size() * spec.seeds.size();
      std::size_t done = 0;
      const GridResult result = run_grid(spec, fs::path(grid_out), [&](const CellResult& c) {
        ++done;
        std::fprintf(stderr, "[%zu/%zu] %s attackers=%u seed=%llu %s\n", done, total,
                     std::string(engine_kind_name(c.protocol)).c_str(), c.attackers,
                     static_cast<unsigned long long>(c.seed),
                     c.ok ? "ok" : ("FAILED: " + c.error).c_str());
      });
      std::size_t failed = 0, broken = 0;
      for (const auto& c : result.cells) {
        if (!c.ok) ++failed;
        else if (!conservation_holds(c.output.summary)) ++broken;
      }
      write_aggregate_csv(std::cout, aggregate(result));
      if (failed > 0) return kExitRuntime;
      return broken > 0 ? kExitCheck : kExitOk;
    }
    if (*verify) return verify_run(verify_dir);
    if (*show) {
      std::cout << format_scenario(load(show_opts));
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
