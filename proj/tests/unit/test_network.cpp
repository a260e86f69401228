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

#include <cmath>
#include <cstring>
#include <random>

#include "polargrid/error.hpp"
#include "polargrid/model.hpp"
#include "polargrid/optimizer.hpp"
#include "polargrid/partition_stats.hpp"
#include "polargrid/ring_cnn.hpp"
#include "polargrid/ring_conv.hpp"
#include "polargrid/synthetic.hpp"
#include "polargrid/voxel_loss.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace pg = polargrid;
namespace pt = polargrid::testing;

namespace {

pg::Tensor3 Row(std::initializer_list<double> v) {
  pg::Tensor3 t(1, 1, static_cast<int>(v.size()));
  std::copy(v.begin(), v.end(), t.data.begin());
  return t;
}

std::vector<double> Values(const pg::Tensor3& t) { return {t.data.begin(), t.data.end()}; }

pg::RingConv2d RandomConv(std::mt19937_64& rng, int in, int out, int k, bool circular) {
  pg::RingConv2d conv(in, out, k, k, 1, 1, circular);
  conv.Initialize(rng);
  std::normal_distribution<double> n(0, 0.5);
  for (Eigen::Index o = 0; o < conv.bias.size(); ++o) conv.bias(o) = n(rng);
  return conv;
}

}  // namespace

// ---- ring convolution ------------------------------------------------------

TEST(RingConv, OneRowExample) {
  pg::RingConv2d conv(1, 1, 1, 3, 1, 1, true);
  conv.weight.setOnes();
  EXPECT_EQ(Values(conv.Forward(Row({1, 2, 3, 4}))), (std::vector<double>{7, 6, 9, 8}));
  conv.set_circular(false);
  EXPECT_EQ(Values(conv.Forward(Row({1, 2, 3, 4}))), (std::vector<double>{3, 6, 9, 7}));
}

TEST(RingConv, IdentityKernel) {
  std::mt19937_64 rng(1);
  pg::RingConv2d conv(3, 3, 3, 3, 1, 1, true);
  for (int c = 0; c < 3; ++c) conv.weight(c, (c * 3 + 1) * 3 + 1) = 1.0;
  const auto x = pt::RandomTensor(rng, 3, 5, 7);
  EXPECT_EQ(Values(conv.Forward(x)), Values(x));
}

TEST(RingConv, MatchesExplicitPadding) {
  std::mt19937_64 rng(2);
  for (bool circular : {true, false}) {
    for (int k : {1, 3, 5}) {
      const auto conv = RandomConv(rng, 2, 3, k, circular);
      const auto x = pt::RandomTensor(rng, 2, 6, 9);
      const auto got = conv.Forward(x), want = pt::ReferenceRingConv(conv, x);
      ASSERT_TRUE(got.SameShape(want));
      for (std::size_t n = 0; n < got.size(); ++n) EXPECT_NEAR(got.data[n], want.data[n], 1e-12);
    }
  }
}

TEST(RingConv, StridedOutputSize) {
  pg::RingConv2d conv(1, 1, 3, 3, 2, 2, true);
  EXPECT_EQ(conv.OutputSize(8, 12), (std::pair<int, int>{4, 6}));
  std::mt19937_64 rng(3);
  conv.Initialize(rng);
  const auto x = pt::RandomTensor(rng, 1, 8, 12);
  const auto want = pt::ReferenceRingConv(conv, x);
  const auto got = conv.Forward(x);
  ASSERT_TRUE(got.SameShape(want));
  for (std::size_t n = 0; n < got.size(); ++n) EXPECT_NEAR(got.data[n], want.data[n], 1e-12);
}

TEST(RingConv, SeamGradientReachesBothEnds) {
  const int w = 8;
  pg::RingConv2d conv(1, 1, 1, 3, 1, 1, true);
  conv.weight.setOnes();
  pg::RingConv2d::Cache cache;
  conv.Forward(pg::Tensor3(1, 1, w, 1.0), &cache);
  pg::Tensor3 g(1, 1, w, 0.0);
  g.at(0, 0, 0) = 1.0;
  const auto dx = conv.Backward(cache, g);
  for (int c = 0; c < w; ++c) {
    const bool touched = c == w - 1 || c == 0 || c == 1;
    EXPECT_EQ(dx.at(0, 0, c), touched ? 1.0 : 0.0) << c;
  }
}

TEST(RingConv, ZeroUpstreamGradient) {
  std::mt19937_64 rng(4);
  auto conv = RandomConv(rng, 2, 3, 3, true);
  pg::RingConv2d::Cache cache;
  conv.Forward(pt::RandomTensor(rng, 2, 4, 6), &cache);
  conv.ZeroGrad();
  const auto dx = conv.Backward(cache, pg::Tensor3(3, 4, 6, 0.0));
  for (double v : dx.data) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE((conv.grad_weight.array() == 0.0).all());
  EXPECT_TRUE((conv.grad_bias.array() == 0.0).all());
}

TEST(RingConv, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  for (bool circular : {true, false}) {
    auto conv = RandomConv(rng, 2, 3, 3, circular);
    auto x = pt::RandomTensor(rng, 2, 5, 6);
    const auto probe = pt::RandomTensor(rng, 3, 5, 6);
    auto loss = [&] { return pt::Dot(conv.Forward(x), probe); };
    pg::RingConv2d::Cache cache;
    conv.Forward(x, &cache);
    conv.ZeroGrad();
    const auto dx = conv.Backward(cache, probe);
    EXPECT_LT(pt::CheckGradient(conv.weight.data(), conv.grad_weight.data(), conv.weight.size(), loss),
              pt::kFdTolerance);
    EXPECT_LT(pt::CheckGradient(conv.bias.data(), conv.grad_bias.data(), conv.bias.size(), loss),
              pt::kFdTolerance);
    EXPECT_LT(pt::CheckGradient(x.data.data(), dx.data.data(), x.size(), loss), pt::kFdTolerance);
  }
}

TEST(RingConv, ChannelMismatchIsRejected) {
  pg::RingConv2d conv(2, 1, 3, 3, 1, 1, true);
  EXPECT_THROW(conv.Forward(pg::Tensor3(3, 4, 4)), pg::Error);
}

TEST(BatchNorm2d, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(6);
  pg::BatchNorm2d bn(3);
  bn.gamma << 1.2, 0.7, -0.4;
  bn.beta << 0.1, 0.0, 0.3;
  auto x = pt::RandomTensor(rng, 3, 4, 5);
  const auto probe = pt::RandomTensor(rng, 3, 4, 5);
  auto loss = [&] { return pt::Dot(bn.Forward(x, pg::Mode::kTrain, nullptr, false), probe); };
  pg::BatchNorm2d::Cache cache;
  bn.Forward(x, pg::Mode::kTrain, &cache, false);
  bn.ZeroGrad();
  const auto dx = bn.Backward(cache, probe);
  EXPECT_LT(pt::CheckGradient(bn.gamma.data(), bn.grad_gamma.data(), 3, loss), pt::kFdTolerance);
  EXPECT_LT(pt::CheckGradient(bn.beta.data(), bn.grad_beta.data(), 3, loss), pt::kFdTolerance);
  EXPECT_LT(pt::CheckGradient(x.data.data(), dx.data.data(), x.size(), loss), pt::kFdTolerance);
}

TEST(BatchNorm2d, TrainingOutputIsStandardized) {
  std::mt19937_64 rng(7);
  pg::BatchNorm2d bn(2);
  const auto y = bn.Forward(pt::RandomTensor(rng, 2, 6, 6), pg::Mode::kTrain);
  const auto m = y.AsMatrix();
  for (int c = 0; c < 2; ++c) {
    EXPECT_NEAR(m.row(c).mean(), 0.0, 1e-12);
    EXPECT_NEAR((m.row(c).array().square()).mean(), 1.0, 1e-3);
  }
}

TEST(GridOps, UpsampleBackwardIsTheAdjoint) {
  std::mt19937_64 rng(8);
  const auto x = pt::RandomTensor(rng, 2, 3, 4);
  const auto g = pt::RandomTensor(rng, 2, 6, 8);
  EXPECT_NEAR(pt::Dot(pg::Upsample2x(x), g), pt::Dot(x, pg::Upsample2xBackward(g)), 1e-12);
}

TEST(GridOps, ConcatSplitAndRoll) {
  std::mt19937_64 rng(9);
  const auto a = pt::RandomTensor(rng, 2, 3, 5), b = pt::RandomTensor(rng, 1, 3, 5);
  const auto [a2, b2] = pg::SplitChannels(pg::ConcatChannels(a, b), 2);
  EXPECT_EQ(a2.data, a.data);
  EXPECT_EQ(b2.data, b.data);
  const auto r = pg::RollColumns(a, 2);
  for (int c = 0; c < 2; ++c)
    for (int h = 0; h < 3; ++h)
      for (int w = 0; w < 5; ++w) EXPECT_EQ(r.at(c, h, (w + 2) % 5), a.at(c, h, w));
  EXPECT_EQ(pg::RollColumns(pg::RollColumns(a, 3), -3).data, a.data);
}

// ---- network ---------------------------------------------------------------

namespace {

pg::RingCnnConfig SmallNet() {
  pg::RingCnnConfig c;
  c.in_channels = 3;
  c.channels = {4, 6, 8};
  c.height_bins = 2;
  c.num_classes = 3;
  return c;
}

}  // namespace

TEST(RingCnn, ZeroWeightsGiveTheHeadBias) {
  std::mt19937_64 rng(10);
  pg::RingCnn net(SmallNet(), rng);
  for (auto& v : net.Params("")) {
    if (v.trainable()) std::fill(v.value, v.value + v.size, 0.0);
  }
  for (Eigen::Index c = 0; c < net.head().bias.size(); ++c) net.head().bias(c) = 0.5 * c - 1;
  const auto pred = net.Forward(pt::RandomTensor(rng, 3, 8, 16), pg::Mode::kInference);
  ASSERT_EQ(pred.logits.channels, 6);
  for (int c = 0; c < 6; ++c)
    for (int h = 0; h < 8; ++h)
      for (int w = 0; w < 16; ++w) EXPECT_EQ(pred.logits.at(c, h, w), 0.5 * c - 1);
}

TEST(RingCnn, FullScaleShapes) {
  pg::RingCnnConfig c;
  c.height_bins = 32;
  c.num_classes = 20;
  std::mt19937_64 rng(11);
  const pg::RingCnn net(c, rng);
  const auto shapes = net.LayerShapes(480, 360);
  ASSERT_FALSE(shapes.empty());
  EXPECT_EQ(shapes.front().in_channels, 64);
  EXPECT_EQ(shapes.back().out_channels, 20 * 32);
  EXPECT_EQ(shapes.back().out_rows, 480);
  EXPECT_EQ(shapes.back().out_cols, 360);
  EXPECT_EQ(net.downsample_factor(), 4);
}

TEST(RingCnn, IndivisibleGridIsRejected) {
  std::mt19937_64 rng(12);
  pg::RingCnn net(SmallNet(), rng);
  EXPECT_THROW(net.Forward(pg::Tensor3(3, 8, 18), pg::Mode::kInference), pg::Error);
}

TEST(RingCnn, RotatingTheInputRotatesTheLogits) {
  std::mt19937_64 rng(13);
  pg::RingCnn net(SmallNet(), rng);
  const auto x = pt::RandomTensor(rng, 3, 8, 16);
  const auto base = net.Forward(x, pg::Mode::kInference);
  for (int shift : {4, 8, 12}) {
    const auto rolled = net.Forward(pg::RollColumns(x, shift), pg::Mode::kInference);
    const auto expect = pg::RollColumns(base.logits, shift);
    for (std::size_t n = 0; n < expect.size(); ++n) {
      EXPECT_NEAR(rolled.logits.data[n], expect.data[n], 1e-10);
    }
  }
}

TEST(RingCnn, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(14);
  pg::RingCnnConfig cfg = SmallNet();
  cfg.channels = {3, 4};
  pg::RingCnn net(cfg, rng);
  auto x = pt::RandomTensor(rng, 3, 4, 8);
  // Inference mode keeps batch norm fixed so only the ReLU kinks remain;
  // nudge biases until no pre-activation sits near zero.
  auto probe = pt::RandomTensor(rng, 6, 4, 8);
  auto loss = [&] { return pt::Dot(net.Forward(x, pg::Mode::kInference).logits, probe); };
  pg::RingCnn::Cache cache;
  net.Forward(x, pg::Mode::kInference, &cache);
  net.ZeroGrad();
  const auto dx = net.Backward(cache, probe);
  double worst = 0.0;
  int checked = 0;
  for (auto& v : net.Params("")) {
    if (!v.trainable()) continue;
    worst = std::max(worst, pt::CheckGradient(v.value, v.grad, v.size, loss));
    ++checked;
  }
  worst = std::max(worst, pt::CheckGradient(x.data.data(), dx.data.data(), x.size(), loss));
  EXPECT_GT(checked, 0);
  EXPECT_LT(worst, 1e-3);
}

TEST(Cost, ClosedFormCounts) {
  const pg::ConvLayerShape one_by_one{"c", 2, 3, 1, 1, 4, 4, true, false};
  const auto cost = pg::CountParamsAndMacs({one_by_one});
  EXPECT_EQ(cost.params, 9);
  EXPECT_DOUBLE_EQ(cost.macs, 96.0);
  const auto none = pg::CountParamsAndMacs({});
  EXPECT_EQ(none.params, 0);
  EXPECT_DOUBLE_EQ(none.macs, 0.0);
  const pg::ConvLayerShape bn3x3{"d", 4, 8, 3, 3, 10, 20, false, true};
  const pg::DenseLayerShape dense{"e", 9, 64, true};
  const auto mixed = pg::CountParamsAndMacs({bn3x3}, {dense}, 1000.0);
  EXPECT_EQ(mixed.params, 4 * 8 * 9 + 2 * 8 + 9 * 64 + 64 + 2 * 64);
  EXPECT_DOUBLE_EQ(mixed.macs, 4.0 * 8 * 9 * 200 + 9.0 * 64 * 1000);
}

// ---- voxel loss and decoding -----------------------------------------------

namespace {

// Cartesian 4 x 1 x 2 grid; voxel (k, i) holds the listed labels.
const pg::GridSpec kTiny = pg::GridSpec::Cartesian({0, 4}, {0, 1}, {0, 2}, 4, 1, 2);

pg::Scan TinyScan(const std::vector<std::tuple<int, int, pg::ClassId>>& pts) {
  pg::Scan s;
  s.labels.emplace();
  for (const auto& [i, k, label] : pts) {
    s.points.push_back({i + 0.5f, 0.5f, k + 0.5f, 0});
    s.labels->push_back(label);
  }
  return s;
}

pg::VoxelPrediction Logits(int classes, std::mt19937_64* rng = nullptr) {
  pg::VoxelPrediction p;
  p.num_classes = classes;
  p.height_bins = 2;
  p.logits = rng ? pt::RandomTensor(*rng, classes * 2, 4, 1) : pg::Tensor3(classes * 2, 4, 1);
  return p;
}

}  // namespace

TEST(VoxelLoss, UniformLogitsGiveLogC) {
  const auto s = TinyScan({{0, 0, 1}, {1, 1, 0}, {2, 0, 1}});
  const auto vox = pg::Quantize(s, kTiny);
  for (int c : {2, 4, 7}) {
    const auto r = pg::VoxelLoss(Logits(c), vox, *s.labels, std::nullopt);
    EXPECT_NEAR(r.loss, std::log(static_cast<double>(c)), 1e-12);
    EXPECT_EQ(r.counted_voxels, 3);
  }
}

TEST(VoxelLoss, LargeMarginGivesNearZeroAndLossFallsWithMargin) {
  const auto s = TinyScan({{0, 0, 1}});
  const auto vox = pg::Quantize(s, kTiny);
  const auto key = vox.voxels.keys[0];
  double prev = 1e9;
  for (double m : {0.0, 1.0, 2.0, 5.0, 50.0}) {
    auto p = Logits(3);
    p.logits.data[1 * p.voxels() + key] = m;
    const double loss = pg::VoxelLoss(p, vox, *s.labels, std::nullopt).loss;
    EXPECT_LT(loss, prev);
    prev = loss;
  }
  EXPECT_LT(prev, 1e-20);
}

TEST(VoxelLoss, TargetIsTheMajorityWithoutIgnore) {
  const auto s = TinyScan({{0, 0, 0}, {0, 0, 0}, {0, 0, 2}, {3, 1, 0}});
  const auto vox = pg::Quantize(s, kTiny);
  auto p = Logits(3);
  const auto key = vox.VoxelKey(vox.assignment[0]);
  p.logits.data[2 * p.voxels() + key] = 1.0;
  const auto r = pg::VoxelLoss(p, vox, *s.labels, pg::ClassId{0});
  EXPECT_EQ(r.counted_voxels, 1);  // the ignore-only voxel is skipped
  EXPECT_EQ(r.correct_voxels, 1);
  const auto other = vox.VoxelKey(vox.assignment[3]);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(r.grad.data[c * p.voxels() + other], 0.0);
}

TEST(VoxelLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(15);
  const auto s = TinyScan({{0, 0, 1}, {0, 0, 2}, {1, 1, 2}, {2, 0, 0}, {3, 1, 1}, {3, 1, 1}});
  const auto vox = pg::Quantize(s, kTiny);
  auto p = Logits(3, &rng);
  const std::vector<double> weights = {0.0, 1.5, 0.5};
  for (const auto& w : {std::vector<double>{}, weights}) {
    const auto r = pg::VoxelLoss(p, vox, *s.labels, pg::ClassId{0}, w);
    auto loss = [&] { return pg::VoxelLoss(p, vox, *s.labels, pg::ClassId{0}, w).loss; };
    EXPECT_LT(pt::CheckGradient(p.logits.data.data(), r.grad.data.data(), p.logits.size(), loss),
              pt::kFdTolerance);
  }
}

TEST(VoxelLoss, NothingToScoreIsAnError) {
  const auto s = TinyScan({{0, 0, 0}});
  EXPECT_THROW(pg::VoxelLoss(Logits(3), pg::Quantize(s, kTiny), *s.labels, pg::ClassId{0}),
               pg::Error);
}

TEST(Decode, PointsInOneVoxelShareALabel) {
  std::mt19937_64 rng(16);
  const auto s = TinyScan({{0, 0, 1}, {0, 0, 2}, {2, 1, 1}, {2, 1, 0}});
  const auto vox = pg::Quantize(s, kTiny);
  const auto p = Logits(3, &rng);
  const auto labels = pg::DecodeToPoints(p, vox);
  EXPECT_EQ(labels[0], labels[1]);
  EXPECT_EQ(labels[2], labels[3]);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const auto key = vox.VoxelKey(vox.assignment[n]);
    for (int c = 0; c < 3; ++c) EXPECT_GE(p.logit(labels[n], key), p.logit(c, key));
  }
}

TEST(Decode, TiesAndExclusion) {
  const auto s = TinyScan({{1, 0, 1}});
  const auto vox = pg::Quantize(s, kTiny);
  auto p = Logits(3);
  EXPECT_EQ(pg::DecodeToPoints(p, vox)[0], 0);
  EXPECT_EQ(pg::DecodeToPoints(p, vox, pg::ClassId{0})[0], 1);
  p.logits.data[0 * p.voxels() + vox.voxels.keys[0]] = 9.0;
  EXPECT_EQ(pg::DecodeToPoints(p, vox, pg::ClassId{0})[0], 1);
}

TEST(Decode, OneHotMajorityReproducesTheUpperBound) {
  std::mt19937_64 rng(17);
  std::vector<std::tuple<int, int, pg::ClassId>> pts;
  for (int n = 0; n < 40; ++n) {
    pts.push_back({static_cast<int>(rng() % 4), static_cast<int>(rng() % 2),
                   static_cast<pg::ClassId>(1 + rng() % 3)});
  }
  const auto s = TinyScan(pts);
  const auto vox = pg::Quantize(s, kTiny);
  const auto majority = pg::VoxelMajority(vox, *s.labels, pg::ClassId{0});
  auto p = Logits(4);
  for (std::size_t v = 0; v < vox.voxels.size(); ++v) {
    p.logits.data[majority[v] * p.voxels() + vox.voxels.keys[v]] = 1.0;
  }
  EXPECT_EQ(pg::DecodeToPoints(p, vox, pg::ClassId{0}),
            pg::UpperBoundLabels(vox, *s.labels, pg::ClassId{0}));
}

// ---- training --------------------------------------------------------------

namespace {

pg::SegmenterConfig TinyModel() {
  pg::SegmenterConfig c;
  c.grid = pg::GridSpec::Polar({3, 50}, {-3, 1.5}, 16, 32, 4);
  c.encoder_widths = {16, 16};
  c.channels = {8, 16};
  c.num_classes = 5;
  c.ignore = 0;
  return c;
}

pg::Scan TinySynth(std::uint64_t seed) {
  auto spec = pg::SynthSpec::Default();
  spec.beams = 16;
  spec.columns = 256;
  return pg::GenerateSyntheticScan(spec, seed);
}

std::vector<std::vector<double>> Snapshot(pg::Segmenter& m) {
  std::vector<std::vector<double>> out;
  for (const auto& v : m.Params()) out.emplace_back(v.value, v.value + v.size);
  return out;
}

}  // namespace

TEST(Train, ZeroLearningRateLeavesParametersUnchanged) {
  pg::Segmenter m(TinyModel(), 1);
  const auto prepared = m.Prepare(TinySynth(1));
  const auto params = m.Params();
  const auto before = Snapshot(m);
  pg::SgdOptimizer opt(0.0, 0.9, 0.0);
  for (int s = 0; s < 3; ++s) m.TrainStep(std::span(&prepared, 1), opt);
  const auto after = Snapshot(m);
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (params[p].trainable()) EXPECT_EQ(before[p], after[p]) << params[p].name;
  }
}

TEST(Train, LossFallsOverTheFirstSteps) {
  pg::Segmenter m(TinyModel(), 2);
  const auto prepared = m.Prepare(TinySynth(2));
  pg::SgdOptimizer opt(0.01, 0.0, 0.0);
  std::vector<double> losses;
  for (int s = 0; s < 10; ++s) losses.push_back(m.TrainStep(std::span(&prepared, 1), opt).loss);
  for (std::size_t s = 1; s < losses.size(); ++s) EXPECT_LT(losses[s], losses[s - 1]) << s;
}

TEST(Train, SameSeedSameParametersBitForBit) {
  std::vector<std::vector<std::vector<double>>> runs;
  for (int run = 0; run < 2; ++run) {
    pg::Segmenter m(TinyModel(), 3);
    std::vector<pg::PreparedScan> data = {m.Prepare(TinySynth(5)), m.Prepare(TinySynth(6))};
    pg::SgdOptimizer opt(0.01, 0.9, 1e-4);
    for (int s = 0; s < 4; ++s) m.TrainStep(std::span(&data[s % 2], 1), opt);
    runs.push_back(Snapshot(m));
  }
  ASSERT_EQ(runs[0].size(), runs[1].size());
  for (std::size_t p = 0; p < runs[0].size(); ++p) {
    ASSERT_EQ(runs[0][p].size(), runs[1][p].size());
    EXPECT_EQ(std::memcmp(runs[0][p].data(), runs[1][p].data(), runs[0][p].size() * 8), 0);
  }
}

TEST(Train, SaveLoadRestoresPredictions) {
  TempDir dir;
  pg::Segmenter a(TinyModel(), 4);
  const auto prepared = a.Prepare(TinySynth(7));
  pg::SgdOptimizer opt(0.01, 0.9, 0.0);
  a.TrainStep(std::span(&prepared, 1), opt);
  a.Save(dir.file("m.ckpt"), "hello");
  pg::Segmenter b(TinyModel(), 99);
  EXPECT_EQ(b.Load(dir.file("m.ckpt")), "hello");
  EXPECT_EQ(a.Predict(prepared), b.Predict(prepared));
  auto other = TinyModel();
  other.channels = {8, 12};
  pg::Segmenter c(other, 4);
  EXPECT_THROW(c.Load(dir.file("m.ckpt")), pg::Error);
}

TEST(Train, PredictionsNeverUseTheIgnoreClass) {
  pg::Segmenter m(TinyModel(), 5);
  const auto prepared = m.Prepare(TinySynth(8));
  for (auto l : m.Predict(prepared)) EXPECT_NE(l, 0);
}

TEST(Train, GridMustDivideByTheDownsampleFactor) {
  auto c = TinyModel();
  c.grid.cells = {16, 30, 4};
  c.channels = {8, 16, 32};
  EXPECT_THROW(pg::Segmenter(c, 0), pg::Error);
}

TEST(Train, SgdMomentumAndDecayRule) {
  double w = 1.0, g = 0.5;
  pg::ParamView view{"w", {1}, &w, &g, 1};
  pg::SgdOptimizer opt(0.1, 0.9, 0.01);
  opt.Step({view});
  const double v1 = 0.5 + 0.01 * 1.0;
  EXPECT_DOUBLE_EQ(w, 1.0 - 0.1 * v1);
  const double w1 = w;
  opt.Step({view});
  const double v2 = 0.9 * v1 + 0.5 + 0.01 * w1;
  EXPECT_DOUBLE_EQ(w, w1 - 0.1 * v2);
}

TEST(Train, ClassWeights) {
  const std::vector<std::int64_t> counts = {50, 30, 20, 0};
  const auto w = pg::InverseLogFrequencyWeights(counts, pg::ClassId{0});
  ASSERT_EQ(w.size(), 4u);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_NEAR(w[1], 1.0 / std::log(1.02 + 0.6), 1e-12);
  EXPECT_NEAR(w[2], 1.0 / std::log(1.02 + 0.4), 1e-12);
  EXPECT_NEAR(w[3], 1.0 / std::log(1.02), 1e-12);
}
