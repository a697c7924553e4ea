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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "manet/crypto.hpp"
#include "manet/mobility.hpp"
#include "manet/radio.hpp"
#include "manet/router.hpp"

namespace manet {

/// Raised for malformed or inconsistent scenario settings. Lists every
/// offending key so the caller can report them all at once.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct CbrFlow {
  NodeId src = 0;
  NodeId dst = 0;
  double start_at = 0.0;

  bool operator==(const CbrFlow&) const = default;
};

struct TrafficParams {
  std::uint32_t flow_count = 10;
  double packet_rate = 4.0;        // packets/s per flow
  std::uint32_t packet_size = 512;  // bytes
  double start_min = 0.0;
  double start_max = 60.0;
  std::optional<double> stop_time;  // defaults to the end of the run
  std::vector<CbrFlow> flows;       // pinned flows; overrides flow_count

  double interval() const { return 1.0 / packet_rate; }
};

struct ScenarioConfig {
  std::uint32_t node_count = 35;
  double sim_time = 60.0;
  std::uint64_t seed = 1;
  EngineKind protocol = EngineKind::kAodv;

  MobilityParams mobility;
  std::vector<Vec2> positions;  // pinned initial positions, one per node
  RadioModel radio;
  TrafficParams traffic;
  ProtocolParams routing;

  std::uint32_t attacker_count = 0;
  std::vector<NodeId> attacker_ids;  // pinned; overrides attacker_count

  std::string hash = "SHA256";
  SignatureScheme signature = SignatureScheme::kEd25519;

  double bucket_width = 1.0;

  /// Throws ConfigError listing every invalid field.
  void validate() const;
  double traffic_stop() const { return traffic.stop_time.value_or(sim_time); }
};

/// Parses `section.key = value` settings in INI form. Unknown sections and
/// keys are errors, except the informational [manifest] section.
ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig load_scenario(const std::string& path);

/// Applies one `key=value` override. `key` may be qualified
/// ("traffic.packet_rate") or bare ("packet_rate") when unambiguous.
void apply_override(ScenarioConfig& cfg, std::string_view assignment);

/// Serializes every setting in the form parse_scenario reads back.
std::string format_scenario(const ScenarioConfig& cfg);

/// Flows and attackers after random draws, fixed for the whole run.
struct ResolvedScenario {
  std::vector<CbrFlow> flows;
  std::vector<NodeId> attackers;  // ascending
};

/// Draws flows from the traffic stream and attackers from the attacker
/// stream unless pinned. Attackers are never flow endpoints. For a fixed
/// seed the attacker set for count k is a prefix of the set for k + 1.
ResolvedScenario resolve_scenario(const ScenarioConfig& cfg);

/// Copy of `cfg` with the resolved flows and attackers pinned.
ScenarioConfig pin_resolved(const ScenarioConfig& cfg,
                            const ResolvedScenario& resolved);

/// Run manifest: the pinned configuration plus an informational
/// [manifest] block that parse_scenario skips.
std::string format_manifest(const ScenarioConfig& cfg,
                            const ResolvedScenario& resolved);

}  // namespace manet
