// Copyright 2026 The mtc Authors
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

#ifndef MTC_RNG_HPP
#define MTC_RNG_HPP

#include <cstdint>

namespace mtc {

// splitmix64. Standard-library distributions are implementation defined, so
// everything that must be reproducible across toolchains (the annealer, test
// generators) draws from this instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    std::uint64_t limit = n * (~std::uint64_t{0} / n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform_real01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool coin_flip() { return (next_u64() & 1u) != 0; }

  /// Decorrelated stream for an independent worker/chain.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    Rng mix(seed ^ (0x632be59bd9b4e019ull * (stream + 1)));
    return mix.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace mtc

#endif  // MTC_RNG_HPP
