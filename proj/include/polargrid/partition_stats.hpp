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

#ifndef POLARGRID_PARTITION_STATS_HPP_
#define POLARGRID_PARTITION_STATS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polargrid/grid.hpp"
#include "polargrid/scan_io.hpp"

namespace polargrid {

// Majority non-ignore label of every occupied voxel, indexed like
// vox.voxels; -1 when a voxel holds only ignore points. Ties go to the
// smallest class id.
std::vector<int> VoxelMajority(const VoxelizedScan& vox,
                               std::span<const ClassId> labels,
                               std::optional<ClassId> ignore);

// Integer moments so that merging across scans is exact and order-free.
struct OccupancyMoments {
  std::int64_t cells = 0;
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;

  void Add(std::int64_t count) {
    ++cells;
    sum += count;
    sum_sq += count * count;
  }
  OccupancyMoments& operator+=(const OccupancyMoments& o) {
    cells += o.cells;
    sum += o.sum;
    sum_sq += o.sum_sq;
    return *this;
  }
  double mean() const;
  // Population standard deviation.
  double stddev() const;
};

struct OccupancyStats {
  std::vector<double> edges;          // bucket edges in meters
  std::vector<OccupancyMoments> buckets;
  OccupancyMoments global;

  OccupancyStats& operator+=(const OccupancyStats& other);
  double bucket_center(std::size_t b) const {
    return 0.5 * (edges[b] + edges[b + 1]);
  }
};

// Points per 2D cell, over every cell of the grid including empty ones.
// Cells are bucketed by the planar distance of their centers into
// [edges[b], edges[b+1]); spherical grids only fill the global moments.
OccupancyStats PointsPerCellStats(const VoxelizedScan& vox,
                                  std::span<const double> edges);

std::vector<double> LogSpacedEdges(double lo, double hi, int bins);
std::vector<double> LinearEdges(double lo, double hi, int bins);

struct PurityCounts {
  std::int64_t majority = 0;
  std::int64_t total = 0;

  PurityCounts& operator+=(const PurityCounts& o) {
    majority += o.majority;
    total += o.total;
    return *this;
  }
  // Throws when no labeled point was counted.
  double purity() const;
};

// Majority-label share over (i, j, k) voxels; ignore points are excluded.
PurityCounts CountPurity(const VoxelizedScan& vox,
                         std::span<const ClassId> labels,
                         std::optional<ClassId> ignore);
double CellPurity(const VoxelizedScan& vox, std::span<const ClassId> labels,
                  std::optional<ClassId> ignore);

// Every point takes its voxel's majority label. Voxels holding only ignore
// points hand out the ignore id.
std::vector<ClassId> UpperBoundLabels(const VoxelizedScan& vox,
                                      std::span<const ClassId> labels,
                                      std::optional<ClassId> ignore);

}  // namespace polargrid

#endif  // POLARGRID_PARTITION_STATS_HPP_
