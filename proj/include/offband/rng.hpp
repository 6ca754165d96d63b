// Copyright 2026 The offband Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "offband/core.hpp"

namespace offband {

// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic random stream keyed by (seed, stream_index, substream).
//
// Generator: xoshiro256** 1.0. The 256-bit state is filled with four
// consecutive SplitMix64 outputs started from a key that hashes the three
// identifiers, so every identifier triple gives an independent-looking
// stream and the same triple reproduces the same draws on every platform.
//
// The experiment harness keys replication r by stream_index = r and splits
// the environment, behavior policy, learner and context draws into
// substreams 0..3 (see harness.hpp).
class RngStream {
 public:
  static constexpr std::string_view kAlgorithm = "xoshiro256** (SplitMix64-seeded)";

  explicit RngStream(std::uint64_t seed, std::uint64_t stream_index = 0,
                     std::uint64_t substream = 0)
      : seed_(seed), stream_index_(stream_index), substream_(substream) {
    std::uint64_t key = splitmix64_mix(seed + 0x9E3779B97F4A7C15ULL);
    key = splitmix64_mix(key ^ (stream_index + 0xD1B54A32D192ED03ULL));
    key = splitmix64_mix(key ^ (substream + 0x8CB92BA72F3D8DD7ULL));
    for (auto& word : state_) {
      key += 0x9E3779B97F4A7C15ULL;
      word = splitmix64_mix(key);
    }
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }
  std::uint64_t substream_index() const noexcept { return substream_; }

  RngStream substream(std::uint64_t which) const {
    return RngStream(seed_, stream_index_, which);
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::uint64_t substream_;
  std::array<std::uint64_t, 4> state_{};
};

// Inverse-CDF sampling over the stored action order. Consumes exactly one
// uniform draw.
inline ActionId sample_action(const Policy& policy, RngStream& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_supported = 0;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    if (policy[i] <= 0.0) continue;
    cumulative += policy[i];
    last_supported = i;
    if (u < cumulative) return ActionId{i};
  }
  // Rounding left the cumulative sum just below u.
  return ActionId{last_supported};
}

}  // namespace offband
