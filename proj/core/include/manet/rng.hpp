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
#include <random>
#include <string_view>

#include "manet/messages.hpp"

namespace manet {

/// Named random substreams derived from one run seed. Adding a consumer on
/// a new stream never perturbs the draws of existing ones.
enum class Stream : std::uint32_t {
  kMobility = 1,
  kTraffic = 2,
  kCryptoSeeds = 3,
  kJitter = 4,
  kAttackers = 5,
  kKeys = 6,
};

/// Portable uniform draws on top of mt19937_64. The standard distributions
/// are implementation-defined, which would make traces differ between
/// standard libraries.
class Rng {
 public:
  Rng() : Rng(0, Stream::kMobility, 0) {}
  Rng(std::uint64_t seed, Stream stream, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi]; returns lo when hi <= lo.
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  Bytes bytes(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace manet
