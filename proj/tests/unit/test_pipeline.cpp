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
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "polargrid/augment.hpp"
#include "polargrid/error.hpp"
#include "polargrid/experiment.hpp"
#include "polargrid/synthetic.hpp"
#include "support/temp_dir.hpp"

namespace pg = polargrid;
namespace fs = std::filesystem;

namespace {

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

pg::Scan FourPoints() {
  pg::Scan s;
  s.points = {{1, 2, 3, 0.5f}, {-4, 0.5f, -1, 0.1f}, {0, -7, 0, 0}, {6, 6, 1, 1}};
  s.labels = std::vector<pg::ClassId>{1, 2, 3, 4};
  return s;
}

// Small synthetic runs that finish in seconds.
pg::ExperimentConfig Quick(const TempDir& dir, pg::SynthSpec spec = {}) {
  if (spec.scene.empty()) {
    spec = pg::SynthSpec::Default();
    spec.beams = 16;
    spec.columns = 256;
  }
  spec.ToConfig().WriteFile(dir.file("scene.ini"));
  pg::ExperimentConfig c = pg::ExperimentConfig::Default();
  c.synth_spec = dir.file("scene.ini");
  c.train_scans = 2;
  c.eval_scans = 2;
  c.encoder_widths = {16, 16};
  c.channels = {8, 16};
  c.steps = 2;
  c.log_every = 1;
  c.out = dir.file("out");
  return c;
}

}  // namespace

// ---- flip augmentation -------------------------------------------------------

TEST(Flip, ForcedBranches) {
  const pg::Scan s = FourPoints();
  const auto& p = s.points[0];
  auto first = [&](pg::FlipBranch b) { return pg::ApplyFlip(s, b).points[0]; };
  EXPECT_EQ(first(pg::FlipBranch::kIdentity).x, p.x);
  EXPECT_EQ(first(pg::FlipBranch::kIdentity).y, p.y);
  EXPECT_EQ(first(pg::FlipBranch::kAcrossXAxis).y, -p.y);
  EXPECT_EQ(first(pg::FlipBranch::kAcrossXAxis).x, p.x);
  EXPECT_EQ(first(pg::FlipBranch::kAcrossYAxis).x, -p.x);
  EXPECT_EQ(first(pg::FlipBranch::kAcrossYAxis).y, p.y);
  EXPECT_EQ(first(pg::FlipBranch::kAcrossDiagonal).x, p.y);
  EXPECT_EQ(first(pg::FlipBranch::kAcrossDiagonal).y, p.x);
}

TEST(Flip, EveryBranchIsAnInvolutionPreservingRadiusHeightAndLabels) {
  const pg::Scan s = FourPoints();
  for (int b = 0; b < 4; ++b) {
    const auto branch = static_cast<pg::FlipBranch>(b);
    const pg::Scan once = pg::ApplyFlip(s, branch);
    const pg::Scan twice = pg::ApplyFlip(once, branch);
    ASSERT_EQ(once.labels, s.labels);
    for (std::size_t n = 0; n < s.size(); ++n) {
      EXPECT_EQ(twice.points[n].x, s.points[n].x);
      EXPECT_EQ(twice.points[n].y, s.points[n].y);
      EXPECT_EQ(once.points[n].z, s.points[n].z);
      EXPECT_EQ(once.points[n].reflection, s.points[n].reflection);
      EXPECT_EQ(std::hypot(once.points[n].x, once.points[n].y),
                std::hypot(s.points[n].x, s.points[n].y));
    }
  }
}

TEST(Flip, BranchesAreDrawnEvenly) {
  std::mt19937_64 rng(1);
  std::array<int, 4> counts{};
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<int>(pg::DrawFlipBranch(rng))];
  for (int c : counts) EXPECT_NEAR(c, n / 4, 5 * std::sqrt(n * 0.1875));
}

// ---- configuration ----------------------------------------------------------

TEST(Experiment, ConfigRoundTripIsByteStable) {
  auto c = pg::ExperimentConfig::Default();
  c.steps = 17;
  c.learning_rate = 0.003;
  c.distance_edges = {0, 10, 25};
  c.grid_kind = pg::GridKind::kSpherical;
  const std::string text = c.ToConfig().ToString();
  const auto back = pg::ExperimentConfig::FromConfig(pg::KeyValueConfig::FromString(text));
  EXPECT_EQ(back.ToConfig().ToString(), text);
  EXPECT_EQ(back.steps, 17);
  EXPECT_EQ(back.grid_kind, pg::GridKind::kSpherical);
}

TEST(Experiment, PartialGridSectionsMergeOverDefaults) {
  const auto c = pg::ExperimentConfig::FromConfig(
      pg::KeyValueConfig::FromString("[grid.polar]\ncells = 32, 48, 4\n"));
  EXPECT_EQ(c.polar.cells, (std::array<int, 3>{32, 48, 4}));
  EXPECT_DOUBLE_EQ(c.polar.bounds[0].max, 50.0);
}

TEST(Experiment, BadValuesAndUnknownKeysAreConfigErrors) {
  for (const char* text : {"[train]\nsteps = -1\n", "[train]\nlearning_rate = abc\n",
                           "[network]\nkernel = 2\n", "[train]\nstepz = 5\n",
                           "[trian]\nsteps = 5\n", "[grid]\nkind = hex\n",
                           "[grid.polar]\nradius = 5, 1\n", "[ablation]\nring_conv = maybe\n"}) {
    try {
      pg::ExperimentConfig::FromConfig(pg::KeyValueConfig::FromString(text));
      ADD_FAILURE() << text;
    } catch (const pg::Error& e) {
      EXPECT_EQ(e.code(), pg::ErrorCode::kConfig) << text;
    }
  }
}

TEST(Experiment, UntunedGridReplacesTheCellCounts) {
  auto c = pg::ExperimentConfig::Default();
  c.tuned_grid = false;
  EXPECT_EQ(c.EffectiveGrid(pg::GridKind::kPolar).cells, (std::array<int, 3>{64, 64, 8}));
  c.tuned_grid = true;
  EXPECT_EQ(c.EffectiveGrid(pg::GridKind::kPolar).cells, (std::array<int, 3>{64, 96, 8}));
  const auto m = c.ModelConfig(pg::GridKind::kCartesian, 5, 0);
  EXPECT_EQ(m.grid.kind, pg::GridKind::kCartesian);
}

// ---- commands ---------------------------------------------------------------

TEST(Commands, UnknownCommandIsRejected) {
  TempDir dir;
  try {
    pg::RunCommand("fly", Quick(dir));
    FAIL();
  } catch (const pg::Error& e) {
    EXPECT_EQ(e.code(), pg::ErrorCode::kInvalidArgument);
  }
}

TEST(Commands, SynthThenScoreGroundTruthAsPredictions) {
  TempDir dir;
  auto c = Quick(dir);
  c.out = dir.file("data");
  pg::RunCommand("synth", c);
  const fs::path labels = dir.path() / "data" / "sequences" / "01" / "labels";
  ASSERT_TRUE(fs::is_directory(labels));

  // Lay the ground truth out as a prediction tree.
  const fs::path preds = dir.path() / "preds" / "sequences" / "01" / "predictions";
  fs::create_directories(preds);
  for (const auto& e : fs::directory_iterator(labels)) fs::copy_file(e.path(), preds / e.path().filename());

  auto k = pg::ExperimentConfig::Default();
  k.source = "kitti";
  k.root = dir.file("data");
  k.train_sequences = {0};
  k.eval_sequences = {1};
  k.predictions = dir.file("preds");
  k.out = dir.file("scored");
  pg::RunCommand("eval", k);
  EXPECT_EQ(Slurp(dir.path() / "scored" / "summary.csv"), "miou,accuracy\n1.000000,1.000000\n");
  const std::string iou = Slurp(dir.path() / "scored" / "iou.csv");
  EXPECT_EQ(iou.rfind("class,iou\n", 0), 0u);
  EXPECT_EQ(iou.find("unlabeled"), std::string::npos);
}

TEST(Commands, UpperBoundOfSingleLabelSceneIsPerfect) {
  TempDir dir;
  pg::SynthSpec ground;
  ground.beams = 8;
  ground.zenith_min_deg = -20;
  ground.zenith_max_deg = -4;
  ground.columns = 128;
  ground.scene.ground = pg::GroundPlane{};
  pg::RunCommand("upper-bound", Quick(dir, ground));
  EXPECT_EQ(Slurp(dir.path() / "out" / "upper_bound.csv"),
            "kind,miou,accuracy\ncartesian,1.000000,1.000000\npolar,1.000000,1.000000\n"
            "spherical,1.000000,1.000000\n");
}

TEST(Commands, StatsAndPurityWriteTheirTables) {
  TempDir dir;
  const auto c = Quick(dir);
  pg::RunCommand("stats", c);
  pg::RunCommand("purity", c);
  const fs::path out = dir.path() / "out";
  const std::string polar = Slurp(out / "stats_polar.csv");
  EXPECT_EQ(polar.rfind("bin_center_m,mean,std\n", 0), 0u);
  // One row per log bucket that holds at least one polar cell center.
  std::set<int> filled;
  for (int i = 0; i < 64; ++i) {
    const double r = 3.0 + (i + 0.5) * 47.0 / 64;
    filled.insert(static_cast<int>(std::floor(40 * std::log(r) / std::log(50.0))));
  }
  EXPECT_EQ(std::count(polar.begin(), polar.end(), '\n'), 1 + static_cast<long>(filled.size()));
  EXPECT_EQ(Slurp(out / "stats_summary.csv").rfind("kind,cells,mean,std\n", 0), 0u);
  EXPECT_TRUE(fs::exists(out / "purity.csv"));
  EXPECT_TRUE(fs::exists(out / "config.ini"));
}

TEST(Commands, TrainPredictEvalRoundTrip) {
  TempDir dir;
  const auto c = Quick(dir);
  pg::RunCommand("train", c);
  const fs::path out = dir.path() / "out";
  for (const char* f : {"model.ckpt", "loss_log.csv", "iou.csv", "distance_miou.csv", "summary.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const std::string log = Slurp(out / "loss_log.csv");
  EXPECT_EQ(log.rfind("step,loss,voxel_accuracy\n", 0), 0u);
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 3);

  pg::RunCommand("predict", c);
  const auto data = pg::OpenDataset(c);
  const auto map = data.label_map;
  for (std::size_t i = 0; i < data.eval.size(); ++i) {
    const fs::path f = out / "sequences" / data.eval.sequence[i] / "predictions" /
                       (data.eval.stem[i] + ".label");
    const auto labels = pg::LoadLabels(f.string(), map);
    EXPECT_EQ(labels.size(), data.eval.load(i).size());
  }

  // Checkpoint evaluation reproduces the numbers written after training.
  const std::string trained = Slurp(out / "summary.csv");
  auto again = c;
  again.out = dir.file("again");
  again.checkpoint = (out / "model.ckpt").string();
  pg::RunCommand("eval", again);
  EXPECT_EQ(Slurp(dir.path() / "again" / "summary.csv"), trained);
}

TEST(Commands, MissingCheckpointIsAnIoError) {
  TempDir dir;
  auto c = Quick(dir);
  c.checkpoint = dir.file("nope.ckpt");
  try {
    pg::RunCommand("eval", c);
    FAIL();
  } catch (const pg::Error& e) {
    EXPECT_EQ(e.code(), pg::ErrorCode::kIo);
  }
}

TEST(Commands, ThreadCountDoesNotChangeResults) {
  TempDir dir;
  auto one = Quick(dir);
  pg::RunCommand("stats", one);
  auto four = one;
  four.threads = 4;
  four.out = dir.file("out4");
  pg::RunCommand("stats", four);
  for (const char* f : {"stats_polar.csv", "stats_cartesian.csv", "stats_summary.csv"}) {
    EXPECT_EQ(Slurp(dir.path() / "out" / f), Slurp(dir.path() / "out4" / f)) << f;
  }
}

TEST(Experiment, ShippedConfigsParse) {
  const std::string dir = std::string(POLARGRID_SOURCE_DIR) + "/configs/";
  const auto desk = pg::ExperimentConfig::FromFile(dir + "desk.ini");
  EXPECT_EQ(desk.ToConfig().ToString(),
            [] {
              auto d = pg::ExperimentConfig::Default();
              d.out = "runs/desk";
              return d.ToConfig().ToString();
            }());
  const auto kitti = pg::ExperimentConfig::FromFile(dir + "semantic_kitti_polar.ini");
  EXPECT_EQ(kitti.source, "kitti");
  EXPECT_EQ(kitti.polar.cells, (std::array<int, 3>{480, 360, 32}));
  const auto scene = pg::SynthSpec::FromFile(dir + "synthetic_scene.ini");
  EXPECT_EQ(scene.ToConfig().ToString(), pg::SynthSpec::Default().ToConfig().ToString());
}
