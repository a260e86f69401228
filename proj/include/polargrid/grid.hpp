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

#ifndef POLARGRID_GRID_HPP_
#define POLARGRID_GRID_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polargrid/config.hpp"
#include "polargrid/scan_io.hpp"

namespace polargrid {

enum class GridKind { kCartesian, kPolar, kSpherical };

const char* GridKindName(GridKind kind);
GridKind ParseGridKind(const std::string& text);

struct Range {
  double min = 0.0;
  double max = 1.0;
  double extent() const { return max - min; }
};

// Partitioning scheme. Axis meaning by kind:
//   cartesian: (x, y, z)
//   polar:     (radius, azimuth, z), azimuth fixed to [-pi, pi) and circular
//   spherical: (zenith, azimuth), zenith measured up from the xy-plane;
//              the third axis has a single cell
struct GridSpec {
  GridKind kind = GridKind::kPolar;
  std::array<Range, 3> bounds{};
  std::array<int, 3> cells{1, 1, 1};

  static GridSpec Cartesian(Range x, Range y, Range z, int nx, int ny, int nz);
  static GridSpec Polar(Range radius, Range z, int n_radius, int n_azimuth,
                        int nz);
  static GridSpec Spherical(Range zenith, int rows, int cols);

  // Reads "kind", and then "x"/"y"/"z", "radius"/"z" or "zenith_deg" ranges
  // plus "cells" from the given section.
  static GridSpec FromConfig(const KeyValueConfig& config,
                             const std::string& section);
  void ToConfig(KeyValueConfig& config, const std::string& section) const;

  void Validate() const;

  int rows() const { return cells[0]; }
  int cols() const { return cells[1]; }
  int heights() const { return cells[2]; }
  std::int64_t num_cells_2d() const {
    return static_cast<std::int64_t>(cells[0]) * cells[1];
  }
  std::int64_t num_voxels() const { return num_cells_2d() * cells[2]; }
  // Whether axis 1 wraps around (azimuth).
  bool circular() const { return kind != GridKind::kCartesian; }

  double cell_width(int axis) const {
    return bounds[axis].extent() / cells[axis];
  }
  double cell_center(int axis, int index) const {
    return bounds[axis].min + (index + 0.5) * cell_width(axis);
  }
  // Planar distance of the 2D cell center from the sensor. NaN for
  // spherical grids, which have no planar location.
  double CellCenterDistance(int i, int j) const;
};

struct CellIndex {
  int i = 0;
  int j = 0;
  int k = 0;
  bool operator==(const CellIndex&) const = default;
};

// Occupied cells in ascending key order, each with its ascending point list.
struct CellGroups {
  std::vector<std::int64_t> keys;
  std::vector<std::int32_t> offsets{0};
  std::vector<std::int32_t> points;

  std::size_t size() const { return keys.size(); }
  std::span<const std::int32_t> members(std::size_t group) const {
    return {points.data() + offsets[group],
            static_cast<std::size_t>(offsets[group + 1] - offsets[group])};
  }
  static CellGroups Build(std::span<const std::int64_t> key_of_point);
};

// One scan under one grid. cells groups points by 2D (i, j) with key
// i * cols + j; voxels groups by (i, j, k) with key (k * rows + i) * cols + j,
// which is the flat offset into a (height, row, col) array.
struct VoxelizedScan {
  GridSpec spec;
  std::vector<CellIndex> assignment;
  CellGroups cells;
  CellGroups voxels;
  // Points at the exact origin (spherical zenith undefined).
  int degenerate_points = 0;

  std::size_t num_points() const { return assignment.size(); }
  std::int64_t CellKey(const CellIndex& c) const {
    return static_cast<std::int64_t>(c.i) * spec.cols() + c.j;
  }
  std::int64_t VoxelKey(const CellIndex& c) const {
    return (static_cast<std::int64_t>(c.k) * spec.rows() + c.i) * spec.cols() +
           c.j;
  }
};

struct PolarCoord {
  double radius = 0.0;
  double azimuth = 0.0;
};

PolarCoord CartesianToPolar(double x, double y);

// Half-open bins with the top boundary folded into the last bin;
// out-of-range values clamp to the nearest end bin.
int BinOf(double value, const Range& range, int n);
// Any angle, wrapped into [-pi, pi) before binning n equal sectors.
int AzimuthBin(double azimuth, int n);
double WrapAngle(double angle);

VoxelizedScan Quantize(const Scan& scan, const GridSpec& spec);
VoxelizedScan SphericalProject(const Scan& scan, const GridSpec& spec);

// Replaces the grid's volume with the scan's own extent (the non-fixed
// volume setting). Azimuth stays full-circle.
GridSpec FitBoundsToScan(const GridSpec& spec, const Scan& scan);

}  // namespace polargrid

#endif  // POLARGRID_GRID_HPP_
