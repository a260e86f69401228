/*
 * Copyright 2026 The polargrid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POLARGRID_RNG_HPP_
#define POLARGRID_RNG_HPP_

#include <cstdint>
#include <random>

namespace polargrid {

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent generator for (seed, salt); used to split per-scan and
// per-purpose streams off one root seed.
inline std::mt19937_64 StreamFor(std::uint64_t seed, std::uint64_t salt) {
  return std::mt19937_64(SplitMix64(seed ^ SplitMix64(salt)));
}

// Uniform in [0, 1) from the top 53 bits; identical on every platform.
inline double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace polargrid

#endif  // POLARGRID_RNG_HPP_
