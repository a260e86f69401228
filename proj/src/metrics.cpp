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

#include "polargrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "polargrid/config.hpp"
#include "polargrid/error.hpp"

namespace polargrid {

ConfusionMatrix::ConfusionMatrix(int num_classes, std::optional<ClassId> ignore)
    : num_classes_(num_classes),
      ignore_(ignore),
      counts_(static_cast<std::size_t>(num_classes) * num_classes, 0) {
  Require(num_classes > 0, ErrorCode::kInvalidArgument,
          "confusion matrix: class count must be positive");
}

void ConfusionMatrix::Accumulate(std::span<const ClassId> gt,
                                 std::span<const ClassId> pred) {
  Require(gt.size() == pred.size(), ErrorCode::kSizeMismatch,
          "confusion matrix: " + std::to_string(gt.size()) +
              " ground-truth labels vs " + std::to_string(pred.size()) +
              " predictions");
  // Validate first so a failed call leaves the matrix untouched.
  for (std::size_t n = 0; n < gt.size(); ++n) {
    if (ignore_ && gt[n] == *ignore_) continue;
    if (gt[n] >= num_classes_ || pred[n] >= num_classes_) {
      Fail(ErrorCode::kInvalidArgument,
           "confusion matrix: class id out of range at index " + std::to_string(n));
    }
  }
  for (std::size_t n = 0; n < gt.size(); ++n) {
    if (ignore_ && gt[n] == *ignore_) continue;
    ++counts_[static_cast<std::size_t>(gt[n]) * num_classes_ + pred[n]];
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (num_classes_ == 0) {
    *this = other;
    return *this;
  }
  Require(num_classes_ == other.num_classes_ && ignore_ == other.ignore_,
          ErrorCode::kInvalidArgument,
          "confusion matrix: cannot merge matrices of different shape");
  for (std::size_t n = 0; n < counts_.size(); ++n) counts_[n] += other.counts_[n];
  return *this;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::optional<double> ConfusionMatrix::Iou(int c) const {
  Require(c >= 0 && c < num_classes_, ErrorCode::kInvalidArgument,
          "iou: class id out of range");
  const std::uint64_t tp = count(c, c);
  std::uint64_t row = 0;
  std::uint64_t col = 0;
  for (int k = 0; k < num_classes_; ++k) {
    row += count(c, k);
    col += count(k, c);
  }
  const std::uint64_t denom = row + col - tp;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(denom);
}

double ConfusionMatrix::MeanIou() const {
  double sum = 0.0;
  int defined = 0;
  for (int c = 0; c < num_classes_; ++c) {
    if (ignore_ && c == *ignore_) continue;
    if (auto iou = Iou(c)) {
      sum += *iou;
      ++defined;
    }
  }
  Require(defined > 0, ErrorCode::kInvalidArgument,
          "miou: no class has a defined IoU");
  return sum / defined;
}

double ConfusionMatrix::Accuracy() const {
  const std::uint64_t t = total();
  Require(t > 0, ErrorCode::kInvalidArgument, "accuracy: no scored points");
  std::uint64_t trace = 0;
  for (int c = 0; c < num_classes_; ++c) trace += count(c, c);
  return static_cast<double>(trace) / static_cast<double>(t);
}

std::optional<double> DistanceBucket::miou() const {
  if (matrix.total() == 0) return std::nullopt;
  return matrix.MeanIou();
}

std::vector<DistanceBucket> DistanceBinnedConfusion(
    std::span<const ClassId> gt, std::span<const ClassId> pred,
    std::span<const Point> points, std::span<const double> edges,
    int num_classes, std::optional<ClassId> ignore) {
  Require(gt.size() == pred.size() && gt.size() == points.size(),
          ErrorCode::kSizeMismatch,
          "distance mIoU: labels, predictions and points differ in length");
  Require(edges.size() >= 2, ErrorCode::kInvalidArgument,
          "distance mIoU: at least two bucket edges required");
  for (std::size_t e = 1; e < edges.size(); ++e) {
    Require(edges[e] > edges[e - 1], ErrorCode::kInvalidArgument,
            "distance mIoU: bucket edges must increase");
  }
  std::vector<DistanceBucket> buckets;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    buckets.push_back({edges[b], edges[b + 1], ConfusionMatrix(num_classes, ignore)});
  }
  // Bucket membership per point, then one Accumulate per bucket.
  std::vector<std::vector<ClassId>> bucket_gt(buckets.size());
  std::vector<std::vector<ClassId>> bucket_pred(buckets.size());
  for (std::size_t n = 0; n < points.size(); ++n) {
    const double x = points[n].x;
    const double y = points[n].y;
    const double d = std::sqrt(x * x + y * y);
    if (d < edges.front() || d >= edges.back()) continue;
    const auto it = std::upper_bound(edges.begin(), edges.end(), d);
    const std::size_t b = static_cast<std::size_t>(it - edges.begin()) - 1;
    bucket_gt[b].push_back(gt[n]);
    bucket_pred[b].push_back(pred[n]);
  }
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    buckets[b].matrix.Accumulate(bucket_gt[b], bucket_pred[b]);
  }
  return buckets;
}

std::vector<std::optional<double>> DistanceBinnedMiou(
    std::span<const ClassId> gt, std::span<const ClassId> pred,
    std::span<const Point> points, std::span<const double> edges,
    int num_classes, std::optional<ClassId> ignore) {
  const auto buckets =
      DistanceBinnedConfusion(gt, pred, points, edges, num_classes, ignore);
  std::vector<std::optional<double>> out;
  for (const auto& b : buckets) out.push_back(b.miou());
  return out;
}

void MergeBuckets(std::vector<DistanceBucket>& into,
                  const std::vector<DistanceBucket>& other) {
  if (into.empty()) {
    into = other;
    return;
  }
  Require(into.size() == other.size(), ErrorCode::kInvalidArgument,
          "distance buckets: cannot merge different binnings");
  for (std::size_t b = 0; b < into.size(); ++b) into[b].matrix += other[b].matrix;
}

namespace {

std::string FormatMetric(std::optional<double> v) {
  if (!v) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

std::string ClassName(const std::vector<std::string>& names, int c) {
  return c < static_cast<int>(names.size()) ? names[c] : "class" + std::to_string(c);
}

}  // namespace

std::string IouCsv(const ConfusionMatrix& cm,
                   const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "class,iou\n";
  for (int c = 0; c < cm.num_classes(); ++c) {
    if (cm.ignore() && c == *cm.ignore()) continue;
    out << ClassName(names, c) << "," << FormatMetric(cm.Iou(c)) << "\n";
  }
  return out.str();
}

std::string IouTable(const ConfusionMatrix& cm,
                     const std::vector<std::string>& names) {
  std::ostringstream out;
  std::size_t width = 8;
  for (int c = 0; c < cm.num_classes(); ++c) {
    width = std::max(width, ClassName(names, c).size());
  }
  auto line = [&](const std::string& name, const std::string& value) {
    out << name << std::string(width + 2 - name.size(), ' ') << value << "\n";
  };
  line("class", "IoU");
  for (int c = 0; c < cm.num_classes(); ++c) {
    if (cm.ignore() && c == *cm.ignore()) continue;
    const auto iou = cm.Iou(c);
    char buf[32];
    if (iou) {
      std::snprintf(buf, sizeof(buf), "%6.2f%%", 100.0 * *iou);
    } else {
      std::snprintf(buf, sizeof(buf), "%7s", "n/a");
    }
    line(ClassName(names, c), buf);
  }
  char buf[64];
  if (cm.total() > 0) {
    std::snprintf(buf, sizeof(buf), "%6.2f%%", 100.0 * cm.MeanIou());
    line("mIoU", buf);
    std::snprintf(buf, sizeof(buf), "%6.2f%%", 100.0 * cm.Accuracy());
    line("accuracy", buf);
  }
  return out.str();
}

std::string DistanceCsv(const std::vector<DistanceBucket>& buckets) {
  std::ostringstream out;
  out << "bin_center_m,miou\n";
  for (const auto& b : buckets) {
    out << FormatDouble(0.5 * (b.lo + b.hi)) << "," << FormatMetric(b.miou()) << "\n";
  }
  return out.str();
}

}  // namespace polargrid
