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

#ifndef POLARGRID_AUGMENT_HPP_
#define POLARGRID_AUGMENT_HPP_

#include <random>

#include "polargrid/scan_io.hpp"

namespace polargrid {

// Mutually exclusive, one quarter each.
enum class FlipBranch {
  kIdentity = 0,
  kAcrossXAxis = 1,  // y -> -y
  kAcrossYAxis = 2,  // x -> -x
  kAcrossDiagonal = 3,  // swap x and y
};

FlipBranch DrawFlipBranch(std::mt19937_64& rng);
Scan ApplyFlip(const Scan& scan, FlipBranch branch);
Scan FlipAugment(const Scan& scan, std::mt19937_64& rng);

}  // namespace polargrid

#endif  // POLARGRID_AUGMENT_HPP_
