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

#ifndef POLARGRID_FEATURES_HPP_
#define POLARGRID_FEATURES_HPP_

#include "polargrid/grid.hpp"
#include "polargrid/scan_io.hpp"
#include "polargrid/tensor.hpp"

namespace polargrid {

// Slot layout of the full per-point feature vector.
//   polar:     (r, theta, z, x, y, dr, dtheta, dz, reflection)
//   cartesian: (x, y, z, x, y, dx, dy, dz, reflection)
//   spherical: (range, theta, zenith, x, y, dzenith, dtheta, z, reflection)
// Residuals are taken against the assigned 2D cell center; dz against the
// midpoint of the z volume. The reduced set keeps slots 0, 1, 2 and 8.
struct FeatureOptions {
  bool nine_features = true;
  // Scale coordinates by the grid extents and residuals by the cell widths.
  bool normalize = false;
};

inline constexpr int kFullFeatureWidth = 9;
inline constexpr int kReducedFeatureWidth = 4;

inline int FeatureWidth(const FeatureOptions& options) {
  return options.nine_features ? kFullFeatureWidth : kReducedFeatureWidth;
}

Matrix BuildPointFeatures(const Scan& scan, const VoxelizedScan& vox,
                          const FeatureOptions& options = {});

}  // namespace polargrid

#endif  // POLARGRID_FEATURES_HPP_
