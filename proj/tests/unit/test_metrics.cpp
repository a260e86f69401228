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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "polargrid/error.hpp"
#include "polargrid/metrics.hpp"
#include "support/oracles.hpp"

namespace pg = polargrid;
using L = std::vector<pg::ClassId>;

namespace {

std::vector<int> Ints(const L& v) { return {v.begin(), v.end()}; }

pg::ConfusionMatrix Matrix(int classes, std::optional<pg::ClassId> ignore, const L& gt,
                           const L& pred) {
  pg::ConfusionMatrix cm(classes, ignore);
  cm.Accumulate(gt, pred);
  return cm;
}

}  // namespace

TEST(Metrics, ThreePointExample) {
  // classes A=0, B=1
  const auto cm = Matrix(2, std::nullopt, {0, 1, 1}, {0, 0, 1});
  EXPECT_DOUBLE_EQ(*cm.Iou(0), 0.5);
  EXPECT_DOUBLE_EQ(*cm.Iou(1), 0.5);
  EXPECT_DOUBLE_EQ(cm.MeanIou(), 0.5);
  EXPECT_DOUBLE_EQ(cm.Accuracy(), 2.0 / 3);
  EXPECT_EQ(cm.count(1, 0), 1u);
  EXPECT_EQ(cm.total(), 3u);
}

TEST(Metrics, PerfectPrediction) {
  const L gt = {1, 2, 3, 3, 2};
  const auto cm = Matrix(4, pg::ClassId{0}, gt, gt);
  EXPECT_DOUBLE_EQ(cm.MeanIou(), 1.0);
  EXPECT_DOUBLE_EQ(cm.Accuracy(), 1.0);
}

TEST(Metrics, EmptyInputIsUndefined) {
  const auto cm = Matrix(3, std::nullopt, {}, {});
  EXPECT_EQ(cm.total(), 0u);
  EXPECT_FALSE(cm.Iou(0).has_value());
  EXPECT_THROW(cm.MeanIou(), pg::Error);
}

TEST(Metrics, AbsentClassIsUndefinedNotZero) {
  const auto cm = Matrix(3, std::nullopt, {0, 0}, {0, 1});
  EXPECT_FALSE(cm.Iou(2).has_value());
  EXPECT_DOUBLE_EQ(*cm.Iou(1), 0.0);
  EXPECT_DOUBLE_EQ(cm.MeanIou(), (0.5 + 0.0) / 2);
}

TEST(Metrics, IgnoredGroundTruthIsSkipped) {
  const auto cm = Matrix(3, pg::ClassId{0}, {0, 0, 1, 2}, {1, 2, 1, 2});
  EXPECT_EQ(cm.total(), 2u);
  EXPECT_DOUBLE_EQ(cm.MeanIou(), 1.0);
  EXPECT_FALSE(cm.Iou(0).has_value());
}

TEST(Metrics, InvalidInputs) {
  pg::ConfusionMatrix cm(3, std::nullopt);
  EXPECT_THROW(cm.Accumulate(L{1, 2}, L{1}), pg::Error);
  EXPECT_THROW(cm.Accumulate(L{1}, L{3}), pg::Error);
  EXPECT_EQ(cm.total(), 0u);  // nothing counted from a rejected batch
  pg::ConfusionMatrix other(4, std::nullopt);
  EXPECT_THROW(cm += other, pg::Error);
}

TEST(Metrics, MatchesSetOracleExhaustively) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 3000; ++trial) {
    const int classes = 1 + static_cast<int>(rng() % 4);
    const int n = static_cast<int>(rng() % 21);
    L gt(n), pred(n);
    for (int p = 0; p < n; ++p) {
      gt[p] = static_cast<pg::ClassId>(rng() % classes);
      pred[p] = static_cast<pg::ClassId>(rng() % classes);
    }
    const auto cm = Matrix(classes, std::nullopt, gt, pred);
    for (int c = 0; c < classes; ++c) {
      const auto want = pg::testing::SetIou(Ints(gt), Ints(pred), c);
      const auto got = cm.Iou(c);
      ASSERT_EQ(got.has_value(), want.has_value());
      if (want) ASSERT_DOUBLE_EQ(*got, *want);
    }
    if (const auto m = pg::testing::SetMiou(Ints(gt), Ints(pred), classes)) {
      ASSERT_NEAR(cm.MeanIou(), *m, 1e-15);
    }
  }
}

TEST(Metrics, OrderAndBatchingDoNotMatter) {
  std::mt19937_64 rng(2);
  L gt(300), pred(300);
  for (int p = 0; p < 300; ++p) {
    gt[p] = static_cast<pg::ClassId>(rng() % 5);
    pred[p] = static_cast<pg::ClassId>(rng() % 5);
  }
  const auto whole = Matrix(5, pg::ClassId{0}, gt, pred);
  std::vector<int> idx(300);
  for (int p = 0; p < 300; ++p) idx[p] = p;
  std::shuffle(idx.begin(), idx.end(), rng);
  L g2, p2;
  for (int i : idx) {
    g2.push_back(gt[i]);
    p2.push_back(pred[i]);
  }
  EXPECT_TRUE(Matrix(5, pg::ClassId{0}, g2, p2) == whole);
  pg::ConfusionMatrix merged;
  for (int start = 0; start < 300; start += 70) {
    const int end = std::min(300, start + 70);
    merged += Matrix(5, pg::ClassId{0}, L(gt.begin() + start, gt.begin() + end),
                     L(pred.begin() + start, pred.begin() + end));
  }
  EXPECT_TRUE(merged == whole);
}

TEST(Metrics, RelabelingBothSidesKeepsMiou) {
  std::mt19937_64 rng(3);
  L gt(200), pred(200);
  for (int p = 0; p < 200; ++p) {
    gt[p] = static_cast<pg::ClassId>(rng() % 4);
    pred[p] = static_cast<pg::ClassId>(rng() % 4);
  }
  std::vector<pg::ClassId> perm = {2, 0, 3, 1};
  L g2, p2;
  for (int p = 0; p < 200; ++p) {
    g2.push_back(perm[gt[p]]);
    p2.push_back(perm[pred[p]]);
  }
  EXPECT_NEAR(Matrix(4, std::nullopt, gt, pred).MeanIou(),
              Matrix(4, std::nullopt, g2, p2).MeanIou(), 1e-15);
}

TEST(Metrics, SingleClassIouEqualsAccuracy) {
  const auto cm = Matrix(1, std::nullopt, {0, 0, 0}, {0, 0, 0});
  EXPECT_DOUBLE_EQ(*cm.Iou(0), cm.Accuracy());
}

TEST(Metrics, RandomPredictionsScoreAboutOneOverC) {
  std::mt19937_64 rng(4);
  const int classes = 5, n = 200000;
  L gt(n), pred(n);
  for (int p = 0; p < n; ++p) {
    gt[p] = static_cast<pg::ClassId>(rng() % classes);
    pred[p] = static_cast<pg::ClassId>(rng() % classes);
  }
  EXPECT_NEAR(Matrix(classes, std::nullopt, gt, pred).Accuracy(), 1.0 / classes, 0.01);
}

TEST(DistanceBins, OneBucketEqualsTheGlobalScore) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(-40, 40);
  std::vector<pg::Point> pts(500);
  L gt(500), pred(500);
  for (int p = 0; p < 500; ++p) {
    pts[p] = {u(rng), u(rng), 0, 0};
    gt[p] = static_cast<pg::ClassId>(rng() % 3);
    pred[p] = static_cast<pg::ClassId>(rng() % 3);
  }
  const std::vector<double> edges = {0, 100};
  const auto buckets = pg::DistanceBinnedConfusion(gt, pred, pts, edges, 3, pg::ClassId{0});
  ASSERT_EQ(buckets.size(), 1u);
  EXPECT_TRUE(buckets[0].matrix == Matrix(3, pg::ClassId{0}, gt, pred));
}

TEST(DistanceBins, PointsLandInHalfOpenBuckets) {
  const std::vector<pg::Point> pts = {{3, 4, 0, 0}, {5, 0, 9, 0}, {0, 9.9f, 0, 0}, {60, 0, 0, 0}};
  const L gt = {1, 2, 1, 1}, pred = {1, 1, 1, 2};
  const std::vector<double> edges = {0, 5, 10};
  const auto b = pg::DistanceBinnedConfusion(gt, pred, pts, edges, 3, std::nullopt);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].matrix.total(), 0u);
  EXPECT_FALSE(b[0].miou().has_value());
  EXPECT_EQ(b[1].matrix.total(), 3u);  // the point at 60 m is outside
  EXPECT_DOUBLE_EQ(b[1].lo, 5.0);
  const auto m = pg::DistanceBinnedMiou(gt, pred, pts, edges, 3, std::nullopt);
  EXPECT_FALSE(m[0].has_value());
  EXPECT_DOUBLE_EQ(*m[1], *b[1].miou());
  auto merged = b;
  pg::MergeBuckets(merged, b);
  EXPECT_EQ(merged[1].matrix.total(), 6u);
}

TEST(Reports, CsvLayouts) {
  const auto cm = Matrix(3, pg::ClassId{0}, {1, 1}, {1, 1});
  const std::vector<std::string> names = {"unlabeled", "road", "car"};
  EXPECT_EQ(pg::IouCsv(cm, names), "class,iou\nroad,1.000000\ncar,nan\n");
  const std::vector<double> edges = {0, 5, 10};
  const std::vector<pg::Point> pts = {{1, 0, 0, 0}};
  const auto b = pg::DistanceBinnedConfusion(L{1}, L{1}, pts, edges, 3, pg::ClassId{0});
  EXPECT_EQ(pg::DistanceCsv(b), "bin_center_m,miou\n2.5,1.000000\n7.5,nan\n");
  EXPECT_NE(pg::IouTable(cm, names).find("road"), std::string::npos);
}
