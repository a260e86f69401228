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

#include "polargrid/features.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "polargrid/error.hpp"

namespace polargrid {

Matrix BuildPointFeatures(const Scan& scan, const VoxelizedScan& vox,
                          const FeatureOptions& options) {
  Require(scan.size() == vox.num_points(), ErrorCode::kShapeMismatch,
          "point features: voxelization does not belong to this scan");
  const GridSpec& spec = vox.spec;
  const double z_mid = 0.5 * (spec.bounds[2].min + spec.bounds[2].max);

  // Per-slot scale applied when normalizing.
  std::array<double, kFullFeatureWidth> scale;
  scale.fill(1.0);
  if (options.normalize) {
    const double pi = std::numbers::pi;
    switch (spec.kind) {
      case GridKind::kCartesian: {
        const double xy = std::max(std::abs(spec.bounds[0].min),
                                   std::abs(spec.bounds[0].max));
        scale = {1 / xy, 1 / xy, 1 / spec.bounds[2].extent(), 1 / xy, 1 / xy,
                 1 / spec.cell_width(0), 1 / spec.cell_width(1),
                 1 / spec.bounds[2].extent(), 1.0};
        break;
      }
      case GridKind::kPolar: {
        const double r = spec.bounds[0].max;
        scale = {1 / r, 1 / pi, 1 / spec.bounds[2].extent(), 1 / r, 1 / r,
                 1 / spec.cell_width(0), 1 / spec.cell_width(1),
                 1 / spec.bounds[2].extent(), 1.0};
        break;
      }
      case GridKind::kSpherical:
        // Range has no grid bound; 50 m is the usual sensor horizon.
        scale = {1 / 50.0, 1 / pi, 1 / (pi / 2), 1 / 50.0, 1 / 50.0,
                 1 / spec.cell_width(0), 1 / spec.cell_width(1), 1 / 5.0, 1.0};
        break;
    }
  }

  const int width = FeatureWidth(options);
  Matrix feats(static_cast<Eigen::Index>(scan.size()), width);
  std::array<double, kFullFeatureWidth> f{};
  for (std::size_t p = 0; p < scan.size(); ++p) {
    const Point& pt = scan.points[p];
    const CellIndex& c = vox.assignment[p];
    const double x = pt.x, y = pt.y, z = pt.z;
    switch (spec.kind) {
      case GridKind::kCartesian:
        f = {x, y, z, x, y, x - spec.cell_center(0, c.i),
             y - spec.cell_center(1, c.j), z - z_mid, pt.reflection};
        break;
      case GridKind::kPolar: {
        const PolarCoord polar = CartesianToPolar(x, y);
        f = {polar.radius, polar.azimuth, z, x, y,
             polar.radius - spec.cell_center(0, c.i),
             WrapAngle(polar.azimuth - spec.cell_center(1, c.j)), z - z_mid,
             pt.reflection};
        break;
      }
      case GridKind::kSpherical: {
        const PolarCoord polar = CartesianToPolar(x, y);
        const double range = std::sqrt(polar.radius * polar.radius + z * z);
        const double zenith = std::atan2(z, polar.radius);
        f = {range, polar.azimuth, zenith, x, y,
             zenith - spec.cell_center(0, c.i),
             WrapAngle(polar.azimuth - spec.cell_center(1, c.j)), z,
             pt.reflection};
        break;
      }
    }
    auto row = feats.row(static_cast<Eigen::Index>(p));
    if (options.nine_features) {
      for (int s = 0; s < kFullFeatureWidth; ++s) row(s) = f[s] * scale[s];
    } else {
      row(0) = f[0] * scale[0];
      row(1) = f[1] * scale[1];
      row(2) = f[2] * scale[2];
      row(3) = f[8] * scale[8];
    }
  }
  return feats;
}

}  // namespace polargrid
