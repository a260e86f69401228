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

#include "polargrid/partition_stats.hpp"

#include <algorithm>
#include <cmath>

#include "polargrid/error.hpp"

namespace polargrid {
namespace {

void CheckLabels(const VoxelizedScan& vox, std::span<const ClassId> labels) {
  Require(labels.size() == vox.num_points(), ErrorCode::kSizeMismatch,
          "label count " + std::to_string(labels.size()) +
              " does not match point count " +
              std::to_string(vox.num_points()));
}

// Returns (label, count) of the most frequent non-ignore label in members.
std::pair<int, std::int64_t> Majority(std::span<const std::int32_t> members,
                                      std::span<const ClassId> labels,
                                      std::optional<ClassId> ignore,
                                      std::vector<ClassId>& scratch) {
  scratch.clear();
  for (std::int32_t p : members) {
    if (ignore && labels[p] == *ignore) continue;
    scratch.push_back(labels[p]);
  }
  if (scratch.empty()) return {-1, 0};
  std::sort(scratch.begin(), scratch.end());
  int best = scratch[0];
  std::int64_t best_count = 0;
  std::size_t run_start = 0;
  for (std::size_t n = 1; n <= scratch.size(); ++n) {
    if (n == scratch.size() || scratch[n] != scratch[run_start]) {
      const auto run = static_cast<std::int64_t>(n - run_start);
      if (run > best_count) {  // strict: keeps the smallest id on ties
        best_count = run;
        best = scratch[run_start];
      }
      run_start = n;
    }
  }
  return {best, best_count};
}

}  // namespace

std::vector<int> VoxelMajority(const VoxelizedScan& vox,
                               std::span<const ClassId> labels,
                               std::optional<ClassId> ignore) {
  CheckLabels(vox, labels);
  std::vector<int> majority(vox.voxels.size());
  std::vector<ClassId> scratch;
  for (std::size_t g = 0; g < vox.voxels.size(); ++g) {
    majority[g] = Majority(vox.voxels.members(g), labels, ignore, scratch).first;
  }
  return majority;
}

double OccupancyMoments::mean() const {
  return cells == 0 ? 0.0 : static_cast<double>(sum) / cells;
}

double OccupancyMoments::stddev() const {
  if (cells == 0) return 0.0;
  const double m = mean();
  const double var = static_cast<double>(sum_sq) / cells - m * m;
  return std::sqrt(std::max(var, 0.0));
}

OccupancyStats& OccupancyStats::operator+=(const OccupancyStats& other) {
  if (buckets.empty() && global.cells == 0) {
    *this = other;
    return *this;
  }
  Require(edges == other.edges, ErrorCode::kInvalidArgument,
          "occupancy stats: cannot merge different bucket edges");
  for (std::size_t b = 0; b < buckets.size(); ++b) buckets[b] += other.buckets[b];
  global += other.global;
  return *this;
}

OccupancyStats PointsPerCellStats(const VoxelizedScan& vox,
                                  std::span<const double> edges) {
  for (std::size_t e = 1; e < edges.size(); ++e) {
    Require(edges[e] > edges[e - 1], ErrorCode::kInvalidArgument,
            "occupancy stats: bucket edges must increase");
  }
  const GridSpec& spec = vox.spec;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(spec.num_cells_2d()), 0);
  for (std::size_t g = 0; g < vox.cells.size(); ++g) {
    counts[vox.cells.keys[g]] = static_cast<std::int64_t>(vox.cells.members(g).size());
  }

  OccupancyStats stats;
  stats.edges.assign(edges.begin(), edges.end());
  stats.buckets.resize(edges.size() > 1 ? edges.size() - 1 : 0);
  for (int i = 0; i < spec.rows(); ++i) {
    for (int j = 0; j < spec.cols(); ++j) {
      const std::int64_t count = counts[static_cast<std::size_t>(i) * spec.cols() + j];
      stats.global.Add(count);
      if (stats.buckets.empty()) continue;
      const double d = spec.CellCenterDistance(i, j);
      if (std::isnan(d) || d < edges.front() || d >= edges.back()) continue;
      const auto it = std::upper_bound(edges.begin(), edges.end(), d);
      stats.buckets[static_cast<std::size_t>(it - edges.begin()) - 1].Add(count);
    }
  }
  return stats;
}

std::vector<double> LogSpacedEdges(double lo, double hi, int bins) {
  Require(lo > 0.0 && hi > lo && bins >= 1, ErrorCode::kInvalidArgument,
          "log edges need 0 < lo < hi and at least one bin");
  std::vector<double> edges(bins + 1);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int e = 0; e <= bins; ++e) edges[e] = std::exp(a + (b - a) * e / bins);
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

std::vector<double> LinearEdges(double lo, double hi, int bins) {
  Require(hi > lo && bins >= 1, ErrorCode::kInvalidArgument,
          "linear edges need lo < hi and at least one bin");
  std::vector<double> edges(bins + 1);
  for (int e = 0; e <= bins; ++e) edges[e] = lo + (hi - lo) * e / bins;
  edges.back() = hi;
  return edges;
}

double PurityCounts::purity() const {
  Require(total > 0, ErrorCode::kInvalidArgument,
          "cell purity: no labeled points");
  return static_cast<double>(majority) / static_cast<double>(total);
}

PurityCounts CountPurity(const VoxelizedScan& vox,
                         std::span<const ClassId> labels,
                         std::optional<ClassId> ignore) {
  CheckLabels(vox, labels);
  PurityCounts counts;
  std::vector<ClassId> scratch;
  for (std::size_t g = 0; g < vox.voxels.size(); ++g) {
    const auto members = vox.voxels.members(g);
    counts.majority += Majority(members, labels, ignore, scratch).second;
    counts.total += static_cast<std::int64_t>(scratch.size());
  }
  return counts;
}

double CellPurity(const VoxelizedScan& vox, std::span<const ClassId> labels,
                  std::optional<ClassId> ignore) {
  return CountPurity(vox, labels, ignore).purity();
}

std::vector<ClassId> UpperBoundLabels(const VoxelizedScan& vox,
                                      std::span<const ClassId> labels,
                                      std::optional<ClassId> ignore) {
  const auto majority = VoxelMajority(vox, labels, ignore);
  std::vector<ClassId> out(labels.size());
  for (std::size_t g = 0; g < vox.voxels.size(); ++g) {
    const ClassId label =
        majority[g] >= 0 ? static_cast<ClassId>(majority[g]) : ignore.value_or(0);
    for (std::int32_t p : vox.voxels.members(g)) out[p] = label;
  }
  return out;
}

}  // namespace polargrid
