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

#include "manet/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "manet/version.hpp"

namespace manet {
namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid scenario:";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  return v;
}

template <class Int>
Int to_int(const std::string& s) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected true/false, got '" + s + "'");
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class Int>
std::string fmt_int(Int v) {
  return std::to_string(v);
}

std::string fmt_bool(bool v) { return v ? "true" : "false"; }

std::string fmt_ids(const std::vector<NodeId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(ids[i]);
  }
  return out;
}

std::vector<NodeId> parse_ids(const std::string& s) {
  std::vector<NodeId> out;
  for (const auto& part : split(s, ',')) out.push_back(to_int<NodeId>(part));
  return out;
}

// "x,y; x,y; ..."
std::vector<Vec2> parse_positions(const std::string& s) {
  std::vector<Vec2> out;
  for (const auto& item : split(s, ';')) {
    auto xy = split(item, ',');
    if (xy.size() != 2) throw std::invalid_argument("expected 'x,y', got '" + item + "'");
    out.push_back({to_double(xy[0]), to_double(xy[1])});
  }
  return out;
}

std::string fmt_positions(const std::vector<Vec2>& ps) {
  std::string out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += "; ";
    out += fmt(ps[i].x) + "," + fmt(ps[i].y);
  }
  return out;
}

// "src>dst@start; ..."
std::vector<CbrFlow> parse_flows(const std::string& s) {
  std::vector<CbrFlow> out;
  for (const auto& item : split(s, ';')) {
    const auto gt = item.find('>');
    const auto at = item.find('@');
    if (gt == std::string::npos || at == std::string::npos || at < gt) {
      throw std::invalid_argument("expected 'src>dst@start', got '" + item + "'");
    }
    out.push_back({to_int<NodeId>(trim(item.substr(0, gt))),
                   to_int<NodeId>(trim(item.substr(gt + 1, at - gt - 1))),
                   to_double(trim(item.substr(at + 1)))});
  }
  return out;
}

std::string fmt_flows(const std::vector<CbrFlow>& flows) {
  std::string out;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    if (i) out += "; ";
    out += std::to_string(flows[i].src) + ">" + std::to_string(flows[i].dst) +
           "@" + fmt(flows[i].start_at);
  }
  return out;
}

struct Setting {
  std::string_view section;
  std::string_view key;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

#define MANET_DOUBLE(sec, name, field)                                         \
  Setting {                                                                    \
    sec, name, [](ScenarioConfig& c, const std::string& v) { c.field = to_double(v); }, \
        [](const ScenarioConfig& c) { return fmt(c.field); }                   \
  }
#define MANET_INT(sec, name, field)                                            \
  Setting {                                                                    \
    sec, name,                                                                 \
        [](ScenarioConfig& c, const std::string& v) {                          \
          c.field = to_int<decltype(c.field)>(v);                              \
        },                                                                     \
        [](const ScenarioConfig& c) { return fmt_int(c.field); }               \
  }

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      MANET_INT("scenario", "node_count", node_count),
      MANET_DOUBLE("scenario", "sim_time", sim_time),
      MANET_INT("scenario", "seed", seed),
      {"scenario", "protocol",
       [](ScenarioConfig& c, const std::string& v) { c.protocol = parse_engine_kind(v); },
       [](const ScenarioConfig& c) { return std::string(engine_kind_name(c.protocol)); }},

      MANET_DOUBLE("mobility", "area_x", mobility.area_x),
      MANET_DOUBLE("mobility", "area_y", mobility.area_y),
      MANET_DOUBLE("mobility", "speed_min", mobility.speed_min),
      MANET_DOUBLE("mobility", "speed_max", mobility.speed_max),
      MANET_DOUBLE("mobility", "pause_time", mobility.pause_time),
      {"mobility", "positions",
       [](ScenarioConfig& c, const std::string& v) { c.positions = parse_positions(v); },
       [](const ScenarioConfig& c) { return fmt_positions(c.positions); }},

      MANET_DOUBLE("radio", "range", radio.range),
      MANET_DOUBLE("radio", "bandwidth", radio.bandwidth),
      MANET_DOUBLE("radio", "proc_delay", radio.per_hop_proc_delay),

      MANET_INT("traffic", "flow_count", traffic.flow_count),
      MANET_DOUBLE("traffic", "packet_rate", traffic.packet_rate),
      MANET_INT("traffic", "packet_size", traffic.packet_size),
      MANET_DOUBLE("traffic", "start_min", traffic.start_min),
      MANET_DOUBLE("traffic", "start_max", traffic.start_max),
      {"traffic", "stop_time",
       [](ScenarioConfig& c, const std::string& v) {
         if (v.empty()) {
           c.traffic.stop_time.reset();
         } else {
           c.traffic.stop_time = to_double(v);
         }
       },
       [](const ScenarioConfig& c) {
         return c.traffic.stop_time ? fmt(*c.traffic.stop_time) : std::string();
       }},
      {"traffic", "flows",
       [](ScenarioConfig& c, const std::string& v) { c.traffic.flows = parse_flows(v); },
       [](const ScenarioConfig& c) { return fmt_flows(c.traffic.flows); }},

      MANET_INT("aodv", "net_diameter", routing.net_diameter),
      MANET_DOUBLE("aodv", "active_route_timeout", routing.active_route_timeout),
      MANET_DOUBLE("aodv", "my_route_timeout", routing.my_route_timeout),
      MANET_DOUBLE("aodv", "reverse_route_timeout", routing.reverse_route_timeout),
      MANET_DOUBLE("aodv", "discovery_wait", routing.discovery_wait),
      MANET_INT("aodv", "discovery_retries", routing.discovery_retries),
      {"aodv", "intermediate_replies",
       [](ScenarioConfig& c, const std::string& v) {
         c.routing.intermediate_replies = to_bool(v);
       },
       [](const ScenarioConfig& c) { return fmt_bool(c.routing.intermediate_replies); }},
      MANET_DOUBLE("aodv", "broadcast_jitter", routing.broadcast_jitter),

      MANET_INT("attack", "attacker_count", attacker_count),
      {"attack", "attacker_ids",
       [](ScenarioConfig& c, const std::string& v) { c.attacker_ids = parse_ids(v); },
       [](const ScenarioConfig& c) { return fmt_ids(c.attacker_ids); }},
      MANET_INT("attack", "bh_seq_boost", routing.bh_seq_boost),

      MANET_INT("fidelity", "phi_initial", routing.phi_initial),
      MANET_INT("fidelity", "phi_threshold", routing.phi_threshold),
      MANET_DOUBLE("fidelity", "ack_timeout", routing.ack_timeout),
      MANET_DOUBLE("fidelity", "fidelity_period", routing.fidelity_period),

      {"crypto", "hash",
       [](ScenarioConfig& c, const std::string& v) { c.hash = v; },
       [](const ScenarioConfig& c) { return c.hash; }},
      {"crypto", "signature",
       [](ScenarioConfig& c, const std::string& v) { c.signature = parse_signature_scheme(v); },
       [](const ScenarioConfig& c) { return std::string(signature_scheme_name(c.signature)); }},

      MANET_DOUBLE("metrics", "bucket_width", bucket_width),
  };
  return table;
}

#undef MANET_DOUBLE
#undef MANET_INT

const Setting* find_setting(std::string_view section, std::string_view key) {
  for (const auto& s : settings()) {
    if (s.section == section && s.key == key) return &s;
  }
  return nullptr;
}

// Resolves "section.key" or a bare key; returns null when unknown or
// ambiguous.
const Setting* find_setting(std::string_view name) {
  const auto dot = name.find('.');
  if (dot != std::string_view::npos) {
    return find_setting(name.substr(0, dot), name.substr(dot + 1));
  }
  const Setting* found = nullptr;
  for (const auto& s : settings()) {
    if (s.key != name) continue;
    if (found != nullptr) return nullptr;
    found = &s;
  }
  return found;
}

void assign(ScenarioConfig& cfg, const Setting& s, const std::string& value,
            std::vector<std::string>& problems) {
  try {
    s.set(cfg, value);
  } catch (const std::exception& e) {
    problems.push_back(std::string(s.section) + "." + std::string(s.key) + ": " +
                       e.what());
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

void ScenarioConfig::validate() const {
  std::vector<std::string> p;
  auto check = [&p](bool ok, std::string msg) {
    if (!ok) p.push_back(std::move(msg));
  };
  check(node_count >= 2, "scenario.node_count: need at least 2 nodes");
  check(sim_time > 0, "scenario.sim_time: must be positive");
  check(mobility.area_x > 0 && mobility.area_y > 0, "mobility.area: must be positive");
  check(mobility.speed_min >= 0 && mobility.speed_max >= mobility.speed_min,
        "mobility.speed_min/speed_max: need 0 <= speed_min <= speed_max");
  check(mobility.pause_time >= 0, "mobility.pause_time: must be non-negative");
  check(positions.empty() || positions.size() == node_count,
        "mobility.positions: need exactly one position per node");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Vec2 v = positions[i];
    check(v.x >= 0 && v.x <= mobility.area_x && v.y >= 0 && v.y <= mobility.area_y,
          "mobility.positions: node " + std::to_string(i) + " lies outside the area");
  }
  check(radio.range > 0, "radio.range: must be positive");
  check(radio.bandwidth > 0, "radio.bandwidth: must be positive");
  check(radio.per_hop_proc_delay >= 0, "radio.proc_delay: must be non-negative");
  check(traffic.packet_rate > 0, "traffic.packet_rate: must be positive");
  check(traffic.packet_size > 0, "traffic.packet_size: must be positive");
  check(traffic.start_min >= 0 && traffic.start_max >= traffic.start_min,
        "traffic.start_min/start_max: need 0 <= start_min <= start_max");
  check(!traffic.stop_time || *traffic.stop_time >= 0,
        "traffic.stop_time: must be non-negative");
  for (const auto& f : traffic.flows) {
    check(f.src < node_count && f.dst < node_count && f.src != f.dst,
          "traffic.flows: " + std::to_string(f.src) + ">" + std::to_string(f.dst) +
              " needs distinct in-range endpoints");
    check(f.start_at >= 0, "traffic.flows: start times must be non-negative");
  }
  check(routing.net_diameter >= 1, "aodv.net_diameter: must be at least 1");
  check(routing.active_route_timeout > 0 && routing.my_route_timeout > 0 &&
            routing.reverse_route_timeout > 0,
        "aodv.*_timeout: must be positive");
  check(routing.discovery_wait > 0, "aodv.discovery_wait: must be positive");
  check(routing.broadcast_jitter >= 0, "aodv.broadcast_jitter: must be non-negative");
  check(attacker_count < node_count, "attack.attacker_count: must be below node_count");
  std::set<NodeId> unique(attacker_ids.begin(), attacker_ids.end());
  check(unique.size() == attacker_ids.size(), "attack.attacker_ids: duplicate id");
  check(attacker_ids.size() < node_count, "attack.attacker_ids: must leave an honest node");
  for (NodeId a : attacker_ids) {
    check(a < node_count, "attack.attacker_ids: " + std::to_string(a) + " out of range");
    for (const auto& f : traffic.flows) {
      check(a != f.src && a != f.dst,
            "attack.attacker_ids: " + std::to_string(a) + " is a flow endpoint");
    }
  }
  check(routing.phi_initial >= 0 && routing.phi_threshold >= 0,
        "fidelity.phi_initial/phi_threshold: must be non-negative");
  check(routing.ack_timeout > 0, "fidelity.ack_timeout: must be positive");
  check(routing.fidelity_period > 0, "fidelity.fidelity_period: must be positive");
  try {
    HashFunction h(hash);
  } catch (const std::exception&) {
    p.push_back("crypto.hash: unknown digest '" + hash + "'");
  }
  check(bucket_width > 0, "metrics.bucket_width: must be positive");
  if (!p.empty()) throw ConfigError(std::move(p));
}

ScenarioConfig parse_scenario(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string("syntax: ") + e.what()});
  }
  ScenarioConfig cfg;
  std::vector<std::string> problems;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {  // key outside any section
      if (const Setting* s = find_setting(name)) {
        assign(cfg, *s, trim(node.data()), problems);
      } else {
        problems.push_back(name + ": unknown key");
      }
      continue;
    }
    if (name == "manifest") continue;
    for (const auto& [key, value] : node) {
      if (const Setting* s = find_setting(name, key)) {
        assign(cfg, *s, trim(value.data()), problems);
      } else {
        problems.push_back(name + "." + key + ": unknown key");
      }
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open"});
  return parse_scenario(in);
}

void apply_override(ScenarioConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError({std::string(assignment) + ": expected key=value"});
  }
  const std::string key = trim(assignment.substr(0, eq));
  const Setting* s = find_setting(key);
  if (s == nullptr) throw ConfigError({key + ": unknown or ambiguous key"});
  std::vector<std::string> problems;
  assign(cfg, *s, trim(assignment.substr(eq + 1)), problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::string format_scenario(const ScenarioConfig& cfg) {
  std::string out;
  std::string_view section;
  for (const auto& s : settings()) {
    if (s.section != section) {
      if (!section.empty()) out += "\n";
      section = s.section;
      out += "[" + std::string(section) + "]\n";
    }
    out += std::string(s.key) + " = " + s.get(cfg) + "\n";
  }
  return out;
}

ResolvedScenario resolve_scenario(const ScenarioConfig& cfg) {
  ResolvedScenario r;
  std::vector<NodeId> endpoints;
  if (!cfg.traffic.flows.empty()) {
    r.flows = cfg.traffic.flows;
  } else {
    for (NodeId n = 0; n < cfg.node_count; ++n) {
      if (std::find(cfg.attacker_ids.begin(), cfg.attacker_ids.end(), n) ==
          cfg.attacker_ids.end()) {
        endpoints.push_back(n);
      }
    }
    if (endpoints.size() < 2 && cfg.traffic.flow_count > 0) {
      throw ConfigError({"traffic.flow_count: fewer than two honest nodes"});
    }
    Rng rng(cfg.seed, Stream::kTraffic, 0);
    for (std::uint32_t i = 0; i < cfg.traffic.flow_count; ++i) {
      const auto n = endpoints.size();
      const auto s = rng.below(n);
      auto d = rng.below(n - 1);
      if (d >= s) ++d;
      const double start = rng.uniform(cfg.traffic.start_min, cfg.traffic.start_max);
      r.flows.push_back({endpoints[s], endpoints[d], start});
    }
  }

  if (!cfg.attacker_ids.empty()) {
    r.attackers = cfg.attacker_ids;
  } else if (cfg.attacker_count > 0) {
    std::set<NodeId> used;
    for (const auto& f : r.flows) {
      used.insert(f.src);
      used.insert(f.dst);
    }
    std::vector<NodeId> pool;
    for (NodeId n = 0; n < cfg.node_count; ++n) {
      if (!used.contains(n)) pool.push_back(n);
    }
    if (pool.size() < cfg.attacker_count) {
      throw ConfigError({"attack.attacker_count: only " + std::to_string(pool.size()) +
                         " nodes are not flow endpoints"});
    }
    Rng rng(cfg.seed, Stream::kAttackers, 0);
    for (std::size_t i = pool.size(); i > 1; --i) {
      std::swap(pool[i - 1], pool[rng.below(i)]);
    }
    r.attackers.assign(pool.begin(), pool.begin() + cfg.attacker_count);
  }
  std::sort(r.attackers.begin(), r.attackers.end());
  return r;
}

ScenarioConfig pin_resolved(const ScenarioConfig& cfg, const ResolvedScenario& resolved) {
  ScenarioConfig out = cfg;
  out.traffic.flows = resolved.flows;
  out.traffic.flow_count = static_cast<std::uint32_t>(resolved.flows.size());
  out.attacker_ids = resolved.attackers;
  out.attacker_count = static_cast<std::uint32_t>(resolved.attackers.size());
  return out;
}

std::string format_manifest(const ScenarioConfig& cfg, const ResolvedScenario& resolved) {
  std::string out = format_scenario(pin_resolved(cfg, resolved));
  out += "\n[manifest]\n";
  out += std::string("version = ") + kVersion + "\n";
  out += "honest_engine = " + std::string(engine_kind_name(cfg.protocol)) + "\n";
  out += "attackers = " + fmt_ids(resolved.attackers) + "\n";
  return out;
}

}  // namespace manet
