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

#ifndef POLARGRID_METRICS_HPP_
#define POLARGRID_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polargrid/scan_io.hpp"

namespace polargrid {

// Rows are ground truth, columns predictions. Points whose ground truth is
// the ignore class are never counted.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  ConfusionMatrix(int num_classes, std::optional<ClassId> ignore);

  void Accumulate(std::span<const ClassId> gt, std::span<const ClassId> pred);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix& other) const = default;

  int num_classes() const { return num_classes_; }
  std::optional<ClassId> ignore() const { return ignore_; }
  std::uint64_t count(int gt, int pred) const {
    return counts_[static_cast<std::size_t>(gt) * num_classes_ + pred];
  }
  std::uint64_t total() const;

  // TP / (TP + FP + FN); nullopt when the class is absent from both sides.
  std::optional<double> Iou(int c) const;
  // Mean over defined, non-ignore classes. Throws if none is defined.
  double MeanIou() const;
  double Accuracy() const;

 private:
  int num_classes_ = 0;
  std::optional<ClassId> ignore_;
  std::vector<std::uint64_t> counts_;
};

// Per-bucket mIoU over planar distance buckets [edges[b], edges[b+1]);
// nullopt for buckets with no scored point.
struct DistanceBucket {
  double lo = 0.0;
  double hi = 0.0;
  ConfusionMatrix matrix;
  std::optional<double> miou() const;
};

std::vector<DistanceBucket> DistanceBinnedConfusion(
    std::span<const ClassId> gt, std::span<const ClassId> pred,
    std::span<const Point> points, std::span<const double> edges,
    int num_classes, std::optional<ClassId> ignore);

std::vector<std::optional<double>> DistanceBinnedMiou(
    std::span<const ClassId> gt, std::span<const ClassId> pred,
    std::span<const Point> points, std::span<const double> edges,
    int num_classes, std::optional<ClassId> ignore);

void MergeBuckets(std::vector<DistanceBucket>& into,
                  const std::vector<DistanceBucket>& other);

// "class,iou" CSV; undefined IoUs are written as "nan".
std::string IouCsv(const ConfusionMatrix& cm, const std::vector<std::string>& names);
std::string IouTable(const ConfusionMatrix& cm, const std::vector<std::string>& names);
// "bin_center_m,miou" CSV.
std::string DistanceCsv(const std::vector<DistanceBucket>& buckets);

}  // namespace polargrid

#endif  // POLARGRID_METRICS_HPP_
