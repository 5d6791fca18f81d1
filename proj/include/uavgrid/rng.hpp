// Copyright 2026 The uavgrid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace uavgrid {

using Rng = std::mt19937_64;

// Independent streams derived from one replication seed: the agent's own
// randomness (exploration, sampling, initialisation) never perturbs the
// adversary's trajectory, so methods see the same adversary for a seed.
struct RngStreams {
  Rng agent;
  Rng adversary;

  static RngStreams from_seed(std::uint64_t seed) {
    const auto lo = static_cast<std::uint32_t>(seed);
    const auto hi = static_cast<std::uint32_t>(seed >> 32);
    std::seed_seq agent_seq{lo, hi, 0x61u};
    std::seed_seq adversary_seq{lo, hi, 0xadu};
    return {Rng(agent_seq), Rng(adversary_seq)};
  }
};

}  // namespace uavgrid
