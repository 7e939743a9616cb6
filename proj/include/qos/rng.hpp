// Copyright 2026 The qosjit Authors
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

#include <cmath>
#include <cstdint>
#include <random>

namespace qos {

// Seed used whenever a caller does not pass one. Never wall-clock.
inline constexpr std::uint64_t kDefaultSeed = 20100601;

// SplitMix64 finalizer (Steele, Lea & Flood).
constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for sweep point (grid_index, seed_index):
//   h0 = SplitMix64(seed)
//   h1 = SplitMix64(h0 ^ (grid_index + 1))
//   h2 = SplitMix64(h1 ^ (seed_index + 1))
// Each point can be re-run in isolation from its derived seed.
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t grid_index,
                                   std::uint64_t seed_index) {
  std::uint64_t h = SplitMix64(seed);
  h = SplitMix64(h ^ (grid_index + 1));
  return SplitMix64(h ^ (seed_index + 1));
}

// MT19937-64 with distribution sampling done here rather than through
// <random> distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Exponential(double rate) { return -std::log1p(-Uniform()) / rate; }

  bool Bernoulli(double p) { return Uniform() < p; }

  std::uint64_t Index(std::uint64_t n) {
    // Rejection sampling avoids modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qos
