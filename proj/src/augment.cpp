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

#include "polargrid/augment.hpp"

#include <utility>

namespace polargrid {

FlipBranch DrawFlipBranch(std::mt19937_64& rng) {
  // Top two bits of one draw; avoids distribution implementation variance.
  return static_cast<FlipBranch>(rng() >> 62);
}

Scan ApplyFlip(const Scan& scan, FlipBranch branch) {
  Scan out = scan;
  for (Point& p : out.points) {
    switch (branch) {
      case FlipBranch::kIdentity:
        break;
      case FlipBranch::kAcrossXAxis:
        p.y = -p.y;
        break;
      case FlipBranch::kAcrossYAxis:
        p.x = -p.x;
        break;
      case FlipBranch::kAcrossDiagonal:
        std::swap(p.x, p.y);
        break;
    }
  }
  return out;
}

Scan FlipAugment(const Scan& scan, std::mt19937_64& rng) {
  return ApplyFlip(scan, DrawFlipBranch(rng));
}

}  // namespace polargrid
