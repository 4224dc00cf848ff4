// Copyright 2026 The seqrec Authors
// SPDX-License-Identifier: Apache-2.0
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

#ifndef SEQREC_RANDOM_H_
#define SEQREC_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace seqrec {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr uint64_t MixBits(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr uint64_t HashName(std::string_view name) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Named sub-stream of a parent seed, e.g. DeriveSeed(global, "sampler").
constexpr uint64_t DeriveSeed(uint64_t parent, std::string_view name) {
  return MixBits(parent ^ MixBits(HashName(name)));
}

constexpr uint64_t DeriveSeed(uint64_t parent, uint64_t index) {
  return MixBits(MixBits(parent) + index);
}

// Uniform double in [0, 1) from the top 53 bits; platform independent.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, bound) by rejection; bound > 0.
inline uint64_t UniformIndex(Rng& rng, uint64_t bound) {
  const uint64_t limit = Rng::max() - Rng::max() % bound;
  uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

}  // namespace seqrec

#endif  // SEQREC_RANDOM_H_
