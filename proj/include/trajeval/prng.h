/* Copyright 2026 The Trajeval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef TRAJEVAL_PRNG_H_
#define TRAJEVAL_PRNG_H_

#include <cstdint>

namespace trajeval {

// SplitMix64 generator. Used instead of <random> engines plus distributions
// because its output is bit-stable across standard libraries, which keeps
// generated scenarios byte-identical everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double NextUniform() {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  double NextUniform(double lo, double hi) {
    return lo + (hi - lo) * NextUniform();
  }

  // Uniform integer in [0, n). n must be positive; the small modulo bias is
  // irrelevant for scenario synthesis.
  std::uint64_t NextBelow(std::uint64_t n) { return Next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace trajeval

#endif  // TRAJEVAL_PRNG_H_
