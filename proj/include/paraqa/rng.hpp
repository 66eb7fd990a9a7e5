// Copyright 2026 The paraqa Authors.
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

#include <cstdint>

namespace paraqa {

// xorshift64* (Vigna, 2016) seeded through one SplitMix64 step so that
// seed 0 is usable. Every operation is on uint64_t with wrap-around:
//
//   seeding:  z = seed + 0x9E3779B97F4A7C15
//             z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//             state = z ^ (z >> 31); if state == 0: state = 0x9E3779B97F4A7C15
//   next():   state ^= state >> 12; state ^= state << 25; state ^= state >> 27
//             return state * 0x2545F4914F6CDD1D
//   below(n): threshold = (2^64 - n) mod n
//             repeat r = next() until r >= threshold; return r mod n
//
// The sampler does a partial Fisher-Yates over the pool of matching items
// in corpus order: for i in 0..k-1: j = i + below(pool_size - i),
// swap(pool[i], pool[j]); the result is pool[0..k).
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    state_ = z ^ (z >> 31);
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  // Uniform in [0, n) without modulo bias. n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace paraqa
