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

#include "manet/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace manet {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

std::string cell_name(const CellResult& c) {
  return std::string(engine_kind_name(c.protocol)) + "_a" + std::to_string(c.attackers) +
         "_s" + std::to_string(c.seed);
}

void write_outputs(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                   const RunOutput& out) {
  {
    auto f = open_out(dir / "manifest.txt");
    f << format_manifest(cfg, out.resolved);
  }
  {
    auto f = open_out(dir / "metrics.csv");
    write_metrics_csv(f, out.series);
  }
  {
    auto f = open_out(dir / "summary.txt");
    write_summary(f, out.summary);
  }
}

RunOutput run_to_dir(const ScenarioConfig& cfg, const std::filesystem::path& dir,
                     bool write_trace) {
  std::filesystem::create_directories(dir);
  RunOutput out;
  if (write_trace) {
    auto f = open_out(dir / "trace.ndjson");
    NdjsonTraceWriter writer(f);
    out = simulate(cfg, &writer);
  } else {
    out = simulate(cfg);
  }
  write_outputs(dir, cfg, out);
  return out;
}

}  // namespace

RunOutput run_single(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                     bool write_trace) {
  cfg.validate();
  return run_to_dir(cfg, out_dir, write_trace);
}

void GridSpec::validate() const {
  std::vector<std::string> problems;
  if (protocols.empty()) problems.emplace_back("grid: protocol list is empty");
  if (attacker_counts.empty()) problems.emplace_back("grid: attacker-count list is empty");
  if (seeds.empty()) problems.emplace_back("grid: seed list is empty");
  for (auto k : attacker_counts) {
    if (k >= base.node_count) {
      problems.push_back("grid: attacker count " + std::to_string(k) +
                         " is not below node_count");
    }
  }
  for (auto p : protocols) {
    if (p == EngineKind::kBlackhole) {
      problems.emplace_back("grid: BLACKHOLE is an attacker role, not a protocol");
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  base.validate();
}

GridResult run_grid(const GridSpec& spec, const std::optional<std::filesystem::path>& out_dir,
                    const std::function<void(const CellResult&)>& on_done) {
  spec.validate();
  GridResult grid;
  for (auto p : spec.protocols) {
    for (auto k : spec.attacker_counts) {
      for (auto s : spec.seeds) {
        CellResult c;
        c.protocol = p;
        c.attackers = k;
        c.seed = s;
        grid.cells.push_back(std::move(c));
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex done_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.cells.size(); i = next++) {
      CellResult& c = grid.cells[i];
      ScenarioConfig cfg = spec.base;
      cfg.protocol = c.protocol;
      cfg.attacker_count = c.attackers;
      cfg.attacker_ids.clear();
      cfg.seed = c.seed;
      try {
        if (out_dir) {
          c.output = run_to_dir(cfg, *out_dir / "cells" / cell_name(c), spec.write_traces);
        } else {
          c.output = simulate(cfg);
        }
        c.ok = true;
      } catch (const std::exception& e) {
        c.error = e.what();
      }
      if (on_done) {
        std::lock_guard lock(done_mu);
        on_done(c);
      }
    }
  };

  unsigned threads = spec.parallelism != 0 ? spec.parallelism
                                           : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    {
      auto f = open_out(*out_dir / "aggregate.csv");
      write_aggregate_csv(f, aggregate(grid));
    }
    {
      auto f = open_out(*out_dir / "aggregate_series.csv");
      write_aggregate_series_csv(f, grid);
    }
    {
      auto f = open_out(*out_dir / "cells.csv");
      f << "protocol,attackers,seed,status,error\n";
      for (const auto& c : grid.cells) {
        std::string err = c.error;
        for (char& ch : err) {
          if (ch == ',' || ch == '\n') ch = ' ';
        }
        f << engine_kind_name(c.protocol) << ',' << c.attackers << ',' << c.seed << ','
          << (c.ok ? "ok" : "failed") << ',' << err << '\n';
      }
    }
    {
      auto f = open_out(*out_dir / "base_config.txt");
      f << format_scenario(spec.base);
    }
  }
  return grid;
}

Stat describe(const std::vector<double>& values) {
  Stat s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<AggregateRow> aggregate(const GridResult& grid) {
  std::vector<AggregateRow> rows;
  std::map<std::pair<EngineKind, std::uint32_t>, std::size_t> index;
  struct Samples {
    std::vector<double> loss, thr, delay, ratio;
  };
  std::vector<Samples> samples;
  for (const auto& c : grid.cells) {
    auto [it, inserted] = index.try_emplace({c.protocol, c.attackers}, rows.size());
    if (inserted) {
      AggregateRow r;
      r.protocol = c.protocol;
      r.attackers = c.attackers;
      rows.push_back(r);
      samples.emplace_back();
    }
    AggregateRow& r = rows[it->second];
    Samples& s = samples[it->second];
    if (!c.ok) {
      ++r.failed;
      continue;
    }
    ++r.runs;
    const RunSummary& sum = c.output.summary;
    s.loss.push_back(static_cast<double>(sum.lost()));
    s.thr.push_back(sum.throughput_bps());
    if (sum.mean_delay_s) s.delay.push_back(*sum.mean_delay_s);
    s.ratio.push_back(sum.delivery_ratio());
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].loss = describe(samples[i].loss);
    rows[i].throughput = describe(samples[i].thr);
    rows[i].delay = describe(samples[i].delay);
    rows[i].delivery_ratio = describe(samples[i].ratio);
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "protocol,attackers,runs,failed,loss_packets_mean,loss_packets_std,"
         "throughput_bps_mean,throughput_bps_std,mean_delay_s_mean,mean_delay_s_std,"
         "delivery_ratio_mean,delivery_ratio_std\n";
  for (const auto& r : rows) {
    out << engine_kind_name(r.protocol) << ',' << r.attackers << ',' << r.runs << ','
        << r.failed << ',' << fmt(r.loss.mean) << ',' << fmt(r.loss.std) << ','
        << fmt(r.throughput.mean) << ',' << fmt(r.throughput.std) << ',';
    if (r.delay.n > 0) {
      out << fmt(r.delay.mean) << ',' << fmt(r.delay.std);
    } else {
      out << ',';
    }
    out << ',' << fmt(r.delivery_ratio.mean) << ',' << fmt(r.delivery_ratio.std) << '\n';
  }
}

void write_aggregate_series_csv(std::ostream& out, const GridResult& grid) {
  out << "protocol,attackers,t,mean_delay_s_mean,mean_delay_s_std,throughput_bps_mean,"
         "throughput_bps_std,cum_lost_mean,cum_lost_std,delivery_ratio_mean,"
         "delivery_ratio_std\n";
  std::map<std::pair<EngineKind, std::uint32_t>, std::vector<const RunOutput*>> groups;
  std::vector<std::pair<EngineKind, std::uint32_t>> order;
  for (const auto& c : grid.cells) {
    const auto key = std::make_pair(c.protocol, c.attackers);
    if (!groups.contains(key)) order.push_back(key);
    auto& g = groups[key];
    if (c.ok) g.push_back(&c.output);
  }
  for (const auto& key : order) {
    const auto& runs = groups[key];
    if (runs.empty()) continue;
    const std::size_t buckets = runs.front()->series.rows.size();
    for (std::size_t b = 0; b < buckets; ++b) {
      std::vector<double> delay, thr, lost, ratio;
      for (const RunOutput* r : runs) {
        const MetricsRow& row = r->series.rows.at(b);
        if (row.mean_delay_s) delay.push_back(*row.mean_delay_s);
        thr.push_back(row.throughput_bps);
        lost.push_back(static_cast<double>(row.cum_lost));
        ratio.push_back(row.delivery_ratio);
      }
      const Stat d = describe(delay), t = describe(thr), l = describe(lost),
                 q = describe(ratio);
      out << engine_kind_name(key.first) << ',' << key.second << ','
          << fmt(runs.front()->series.rows[b].t) << ',';
      if (d.n > 0) {
        out << fmt(d.mean) << ',' << fmt(d.std);
      } else {
        out << ',';
      }
      out << ',' << fmt(t.mean) << ',' << fmt(t.std) << ',' << fmt(l.mean) << ','
          << fmt(l.std) << ',' << fmt(q.mean) << ',' << fmt(q.std) << '\n';
    }
  }
}

}  // namespace manet
