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

#include "polargrid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "polargrid/error.hpp"

namespace polargrid {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

Range ReadRange(const KeyValueConfig& config, const std::string& section,
                const std::string& key, double scale = 1.0) {
  const auto values = config.GetDoubleList(section, key, {});
  if (values.size() != 2) {
    Fail(ErrorCode::kConfig,
         section + "." + key + ": expected 'min, max' (two numbers)");
  }
  return {values[0] * scale, values[1] * scale};
}

std::string RangeText(const Range& r, double scale = 1.0) {
  return JoinDoubles({r.min / scale, r.max / scale});
}

}  // namespace

const char* GridKindName(GridKind kind) {
  switch (kind) {
    case GridKind::kCartesian: return "cartesian";
    case GridKind::kPolar: return "polar";
    case GridKind::kSpherical: return "spherical";
  }
  return "unknown";
}

GridKind ParseGridKind(const std::string& text) {
  if (text == "cartesian") return GridKind::kCartesian;
  if (text == "polar") return GridKind::kPolar;
  if (text == "spherical") return GridKind::kSpherical;
  Fail(ErrorCode::kConfig, "unknown grid kind '" + text +
                               "' (expected cartesian, polar or spherical)");
}

GridSpec GridSpec::Cartesian(Range x, Range y, Range z, int nx, int ny, int nz) {
  GridSpec spec;
  spec.kind = GridKind::kCartesian;
  spec.bounds = {x, y, z};
  spec.cells = {nx, ny, nz};
  spec.Validate();
  return spec;
}

GridSpec GridSpec::Polar(Range radius, Range z, int n_radius, int n_azimuth,
                         int nz) {
  GridSpec spec;
  spec.kind = GridKind::kPolar;
  spec.bounds = {radius, Range{-kPi, kPi}, z};
  spec.cells = {n_radius, n_azimuth, nz};
  spec.Validate();
  return spec;
}

GridSpec GridSpec::Spherical(Range zenith, int rows, int cols) {
  GridSpec spec;
  spec.kind = GridKind::kSpherical;
  spec.bounds = {zenith, Range{-kPi, kPi}, Range{0.0, 1.0}};
  spec.cells = {rows, cols, 1};
  spec.Validate();
  return spec;
}

void GridSpec::Validate() const {
  for (int a = 0; a < 3; ++a) {
    if (cells[a] < 1) {
      Fail(ErrorCode::kConfig, "grid: cell counts must be >= 1");
    }
    if (!(bounds[a].max > bounds[a].min) || !std::isfinite(bounds[a].min) ||
        !std::isfinite(bounds[a].max)) {
      Fail(ErrorCode::kConfig, "grid: every axis needs finite bounds with max > min");
    }
  }
  if (circular() && (bounds[1].min != -kPi || bounds[1].max != kPi)) {
    Fail(ErrorCode::kConfig, "grid: azimuth axis must cover [-pi, pi)");
  }
  if (kind == GridKind::kPolar && bounds[0].min < 0.0) {
    Fail(ErrorCode::kConfig, "grid: polar radius bounds must be non-negative");
  }
  if (kind == GridKind::kSpherical) {
    if (cells[2] != 1) {
      Fail(ErrorCode::kConfig, "grid: spherical grids have two axes");
    }
    if (bounds[0].min < -kPi / 2 || bounds[0].max > kPi / 2) {
      Fail(ErrorCode::kConfig, "grid: zenith range must lie in [-90, 90] deg");
    }
  }
}

GridSpec GridSpec::FromConfig(const KeyValueConfig& config,
                              const std::string& section) {
  const GridKind kind = ParseGridKind(config.GetString(section, "kind", "polar"));
  const auto cells = config.GetIntList(section, "cells", {});
  switch (kind) {
    case GridKind::kCartesian:
      if (cells.size() != 3) {
        Fail(ErrorCode::kConfig, section + ".cells: cartesian needs 3 counts");
      }
      return Cartesian(ReadRange(config, section, "x"),
                       ReadRange(config, section, "y"),
                       ReadRange(config, section, "z"), cells[0], cells[1],
                       cells[2]);
    case GridKind::kPolar:
      if (cells.size() != 3) {
        Fail(ErrorCode::kConfig, section + ".cells: polar needs 3 counts");
      }
      return Polar(ReadRange(config, section, "radius"),
                   ReadRange(config, section, "z"), cells[0], cells[1],
                   cells[2]);
    case GridKind::kSpherical:
      if (cells.size() != 2) {
        Fail(ErrorCode::kConfig, section + ".cells: spherical needs 2 counts");
      }
      return Spherical(ReadRange(config, section, "zenith_deg", kDeg), cells[0],
                       cells[1]);
  }
  Fail(ErrorCode::kConfig, "unreachable grid kind");
}

void GridSpec::ToConfig(KeyValueConfig& config,
                        const std::string& section) const {
  config.Set(section, "kind", GridKindName(kind));
  switch (kind) {
    case GridKind::kCartesian:
      config.Set(section, "x", RangeText(bounds[0]));
      config.Set(section, "y", RangeText(bounds[1]));
      config.Set(section, "z", RangeText(bounds[2]));
      config.Set(section, "cells", JoinInts({cells[0], cells[1], cells[2]}));
      break;
    case GridKind::kPolar:
      config.Set(section, "radius", RangeText(bounds[0]));
      config.Set(section, "z", RangeText(bounds[2]));
      config.Set(section, "cells", JoinInts({cells[0], cells[1], cells[2]}));
      break;
    case GridKind::kSpherical:
      config.Set(section, "zenith_deg", RangeText(bounds[0], kDeg));
      config.Set(section, "cells", JoinInts({cells[0], cells[1]}));
      break;
  }
}

double GridSpec::CellCenterDistance(int i, int j) const {
  switch (kind) {
    case GridKind::kCartesian:
      return std::hypot(cell_center(0, i), cell_center(1, j));
    case GridKind::kPolar:
      return cell_center(0, i);
    case GridKind::kSpherical:
      break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

CellGroups CellGroups::Build(std::span<const std::int64_t> key_of_point) {
  std::vector<std::pair<std::int64_t, std::int32_t>> order(key_of_point.size());
  for (std::size_t p = 0; p < key_of_point.size(); ++p) {
    order[p] = {key_of_point[p], static_cast<std::int32_t>(p)};
  }
  std::sort(order.begin(), order.end());
  CellGroups groups;
  groups.points.reserve(order.size());
  for (std::size_t n = 0; n < order.size(); ++n) {
    if (n == 0 || order[n].first != order[n - 1].first) {
      if (n != 0) groups.offsets.push_back(static_cast<std::int32_t>(n));
      groups.keys.push_back(order[n].first);
    }
    groups.points.push_back(order[n].second);
  }
  if (!order.empty()) {
    groups.offsets.push_back(static_cast<std::int32_t>(order.size()));
  }
  return groups;
}

PolarCoord CartesianToPolar(double x, double y) {
  PolarCoord c;
  c.radius = std::sqrt(x * x + y * y);
  c.azimuth = std::atan2(y, x);
  if (c.azimuth >= kPi) c.azimuth -= 2.0 * kPi;
  return c;
}

int BinOf(double value, const Range& range, int n) {
  if (value <= range.min) return 0;
  if (value >= range.max) return n - 1;
  const int b = static_cast<int>(
      std::floor((value - range.min) / (range.max - range.min) * n));
  return std::clamp(b, 0, n - 1);
}

double WrapAngle(double angle) {
  if (angle >= -kPi && angle < kPi) return angle;
  double wrapped = angle - 2.0 * kPi * std::floor((angle + kPi) / (2.0 * kPi));
  if (wrapped >= kPi) wrapped -= 2.0 * kPi;
  if (wrapped < -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

int AzimuthBin(double azimuth, int n) {
  const double a = WrapAngle(azimuth);
  int b = static_cast<int>(std::floor((a + kPi) / (2.0 * kPi) * n));
  if (b >= n) b -= n;
  if (b < 0) b += n;
  return b;
}

namespace {

void FinishGroups(VoxelizedScan& vox) {
  std::vector<std::int64_t> keys(vox.assignment.size());
  for (std::size_t p = 0; p < keys.size(); ++p) {
    keys[p] = vox.CellKey(vox.assignment[p]);
  }
  vox.cells = CellGroups::Build(keys);
  for (std::size_t p = 0; p < keys.size(); ++p) {
    keys[p] = vox.VoxelKey(vox.assignment[p]);
  }
  vox.voxels = CellGroups::Build(keys);
}

}  // namespace

VoxelizedScan Quantize(const Scan& scan, const GridSpec& spec) {
  spec.Validate();
  if (spec.kind == GridKind::kSpherical) return SphericalProject(scan, spec);
  Require(scan.size() > 0, ErrorCode::kInvalidArgument,
          "quantize: scan has no points");

  VoxelizedScan vox;
  vox.spec = spec;
  vox.assignment.resize(scan.size());
  for (std::size_t p = 0; p < scan.size(); ++p) {
    const Point& pt = scan.points[p];
    CellIndex& c = vox.assignment[p];
    if (spec.kind == GridKind::kCartesian) {
      c.i = BinOf(pt.x, spec.bounds[0], spec.cells[0]);
      c.j = BinOf(pt.y, spec.bounds[1], spec.cells[1]);
    } else {
      const PolarCoord polar = CartesianToPolar(pt.x, pt.y);
      c.i = BinOf(polar.radius, spec.bounds[0], spec.cells[0]);
      c.j = AzimuthBin(polar.azimuth, spec.cells[1]);
    }
    c.k = BinOf(pt.z, spec.bounds[2], spec.cells[2]);
  }
  FinishGroups(vox);
  return vox;
}

VoxelizedScan SphericalProject(const Scan& scan, const GridSpec& spec) {
  spec.Validate();
  Require(spec.kind == GridKind::kSpherical, ErrorCode::kInvalidArgument,
          "spherical_project: grid kind must be spherical");
  Require(scan.size() > 0, ErrorCode::kInvalidArgument,
          "spherical_project: scan has no points");

  VoxelizedScan vox;
  vox.spec = spec;
  vox.assignment.resize(scan.size());
  for (std::size_t p = 0; p < scan.size(); ++p) {
    const Point& pt = scan.points[p];
    const double x = pt.x;
    const double y = pt.y;
    const double z = pt.z;
    const double planar = std::sqrt(x * x + y * y);
    if (planar == 0.0 && z == 0.0) ++vox.degenerate_points;
    // atan2(+-0, 0) == +-0: the origin lands in the bin holding zenith 0.
    const double zenith = std::atan2(z, planar);
    CellIndex& c = vox.assignment[p];
    c.i = BinOf(zenith, spec.bounds[0], spec.cells[0]);
    c.j = AzimuthBin(std::atan2(y, x), spec.cells[1]);
    c.k = 0;
  }
  FinishGroups(vox);
  return vox;
}

GridSpec FitBoundsToScan(const GridSpec& spec, const Scan& scan) {
  Require(scan.size() > 0, ErrorCode::kInvalidArgument,
          "fit bounds: scan has no points");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::array<Range, 3> seen;
  seen.fill(Range{kInf, -kInf});
  auto grow = [](Range& r, double v) {
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
  };
  for (const Point& pt : scan.points) {
    const double x = pt.x, y = pt.y, z = pt.z;
    switch (spec.kind) {
      case GridKind::kCartesian:
        grow(seen[0], x);
        grow(seen[1], y);
        grow(seen[2], z);
        break;
      case GridKind::kPolar:
        grow(seen[0], std::sqrt(x * x + y * y));
        grow(seen[2], z);
        break;
      case GridKind::kSpherical:
        grow(seen[0], std::atan2(z, std::sqrt(x * x + y * y)));
        break;
    }
  }
  GridSpec fitted = spec;
  for (int a : {0, 1, 2}) {
    if (spec.circular() && a == 1) continue;
    if (spec.kind == GridKind::kSpherical && a == 2) continue;
    Range r = seen[a];
    if (!(r.max > r.min)) r.max = r.min + 1e-6;
    if (spec.kind == GridKind::kSpherical) {
      r.max = std::min(r.max, kPi / 2);
      r.min = std::min(r.min, r.max - 1e-6);
    }
    fitted.bounds[a] = r;
  }
  fitted.Validate();
  return fitted;
}

}  // namespace polargrid
