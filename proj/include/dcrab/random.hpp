/* Copyright 2026 The dcrab Authors. All Rights Reserved.
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

#pragma once

#include <cstdint>
#include <random>

namespace dcrab {

/// Random stream used throughout the library. Every stochastic operation takes
/// one of these by reference so callers control seeding.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based child seed: the stream for `index` under `parent` depends only
/// on the pair, never on how many siblings were drawn before it.
constexpr std::uint64_t child_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix_seed(mix_seed(parent) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

}  // namespace dcrab
