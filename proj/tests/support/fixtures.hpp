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

// Shared builders for unit and acceptance tests.

#pragma once

#include <openssl/sha.h>

#include <cstdint>
#include <random>
#include <vector>

#include "manet/crypto.hpp"
#include "manet/messages.hpp"
#include "manet/scenario.hpp"

namespace manet::testing {

// SHA-256 straight from libcrypto's one-shot API, independent of
// HashFunction.
inline Bytes sha256(const Bytes& in) {
  Bytes out(SHA256_DIGEST_LENGTH);
  SHA256(in.data(), in.size(), out.data());
  return out;
}

inline Bytes sha256_fold(Bytes v, std::uint32_t times) {
  for (std::uint32_t i = 0; i < times; ++i) v = sha256(v);
  return v;
}

inline Bytes random_bytes(std::mt19937_64& gen, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(gen());
  return b;
}

inline std::uint32_t random_u32(std::mt19937_64& gen) {
  return static_cast<std::uint32_t>(gen());
}

inline SecurityExtension random_extension(std::mt19937_64& gen, bool with_dest_reply) {
  SecurityExtension ext;
  ext.signature = random_bytes(gen, 64);
  ext.hash = random_bytes(gen, 32);
  ext.top_hash = random_bytes(gen, 32);
  ext.max_hop_count = 1 + random_u32(gen) % 64;
  ext.signer = random_u32(gen) % 100;
  ext.sig_kind = with_dest_reply ? SignatureKind::kDouble : SignatureKind::kSingle;
  if (with_dest_reply) ext.dest_reply = random_bytes(gen, 1 + gen() % 200);
  return ext;
}

// One random message of each variant, in variant order.
inline std::vector<RoutingMessage> random_messages(std::mt19937_64& gen) {
  auto maybe_ext = [&gen]() -> std::optional<SecurityExtension> {
    if (gen() % 3 == 0) return std::nullopt;
    return random_extension(gen, gen() % 2 == 0);
  };
  Rreq q{random_u32(gen), random_u32(gen), random_u32(gen), random_u32(gen),
         random_u32(gen), random_u32(gen) % 64, random_u32(gen) % 64, maybe_ext()};
  Rrep p{random_u32(gen), random_u32(gen), random_u32(gen), random_u32(gen) % 64,
         1.0 + static_cast<double>(gen() % 100000) / 7.0, random_u32(gen), maybe_ext()};
  Rerr e;
  for (std::uint64_t i = 0, n = 1 + gen() % 5; i < n; ++i) {
    e.unreachable.emplace_back(random_u32(gen), random_u32(gen));
  }
  DataPacket d{random_u32(gen), random_u32(gen), random_u32(gen), random_u32(gen),
               512, static_cast<double>(gen() % 60000) / 1000.0, random_u32(gen) % 64};
  AckPacket a{random_u32(gen), random_u32(gen), random_u32(gen), random_u32(gen)};
  AlarmPacket al{random_u32(gen), random_u32(gen), maybe_ext()};
  FidelityExchange f{random_u32(gen), {}};
  for (std::uint64_t i = 0, n = gen() % 6; i < n; ++i) {
    f.entries[random_u32(gen)] = static_cast<std::int32_t>(gen() % 20);
  }
  return {q, p, e, d, a, al, f};
}

inline CryptoSuite make_suite(std::size_t nodes, SignatureScheme scheme,
                              std::uint64_t seed = 7) {
  return CryptoSuite{HashFunction("SHA256"), KeyRegistry::provision(nodes, seed, scheme)};
}

// Static scenario with pinned positions and flows; nodes never move.
inline ScenarioConfig static_scenario(std::vector<Vec2> positions,
                                      std::vector<CbrFlow> flows) {
  ScenarioConfig cfg;
  cfg.node_count = static_cast<std::uint32_t>(positions.size());
  cfg.positions = std::move(positions);
  cfg.mobility.speed_min = 0.0;
  cfg.mobility.speed_max = 0.0;
  cfg.traffic.flows = std::move(flows);
  cfg.traffic.flow_count = static_cast<std::uint32_t>(cfg.traffic.flows.size());
  return cfg;
}

// A - B - C on a line, 200 m apart: A and C are out of range of each other.
inline ScenarioConfig line_scenario(EngineKind protocol = EngineKind::kAodv) {
  ScenarioConfig cfg = static_scenario({{0, 250}, {200, 250}, {400, 250}},
                                       {{0, 2, 1.0}});
  cfg.protocol = protocol;
  return cfg;
}

// S(0) and H(1) near the origin, attacker A(2) the only relay to D(3).
inline ScenarioConfig forced_path_scenario() {
  ScenarioConfig cfg = static_scenario({{0, 0}, {0, 100}, {200, 0}, {400, 0}},
                                       {{0, 3, 1.0}});
  cfg.protocol = EngineKind::kPcAodvBh;
  cfg.attacker_ids = {2};
  return cfg;
}

}  // namespace manet::testing
