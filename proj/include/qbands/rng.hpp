// Copyright 2026 The qbands Authors
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

// Counter-based random streams. Every stream is a (key, counter) pair and the
// i-th draw is mix(key + i * gamma), so streams can be split by hashing a
// path of integers (k-point, restart, word, ...) into a new key and any draw
// can be replayed from its seed alone.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace qbands {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of a child stream: seed -> mix(seed ^ mix(id_0)) -> ... for each id.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  for (std::uint64_t id : path) seed = splitmix64(seed ^ splitmix64(id + 0x632be59bd9b4e019ULL));
  return seed;
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : key_(splitmix64(seed)), seed_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return splitmix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Rng split(std::uint64_t stream) const { return Rng(derive_seed(seed_, {stream})); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace qbands
