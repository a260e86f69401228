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

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "support/temp_dir.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr
};

RunResult Cli(const std::string& args) {
  const std::string cmd = std::string(POLARGRID_CLI) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void Spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// Tiny sensor so each command takes well under a second.
const char* kTinyScene =
    "[sensor]\nbeams = 16\ncolumns = 256\n"
    "[classes]\nnames = unlabeled, ground, building, car, pole\nignore = 0\n"
    "[ground]\nz = -1.73\nlabel = 1\n"
    "[random]\ncars = 4\nbuildings = 3\npoles = 4\n";

std::string Quick(const TempDir& dir) {
  Spit(dir.path() / "scene.ini", kTinyScene);
  return "--set data.synth_spec=" + dir.file("scene.ini") +
         " --set data.train_scans=1 --set data.eval_scans=2"
         " --set encoder.widths=16,16 --set network.channels=8,16";
}

// Synthetic dataset on disk plus a config that reads it back as kitti data.
std::string KittiCopy(const TempDir& dir) {
  const auto r = Cli(Quick(dir) + " --out " + dir.file("data") + " synth");
  EXPECT_EQ(r.code, 0) << r.output;
  return "--set data.source=kitti --set data.root=" + dir.file("data") +
         " --set data.train_sequences=0 --set data.eval_sequences=1";
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(Cli("").code, 2);
  EXPECT_EQ(Cli("fly").code, 2);
  EXPECT_EQ(Cli("--grid hexagonal stats").code, 2);
  EXPECT_EQ(Cli("--set nodot stats").code, 2);
  EXPECT_EQ(Cli("--threads 0 stats").code, 2);
  EXPECT_EQ(Cli("train --steps -3").code, 2);
}

TEST(Cli, HelpAndVersion) {
  const auto help = Cli("--help");
  EXPECT_EQ(help.code, 0);
  for (const char* cmd : {"synth", "stats", "purity", "upper-bound", "train", "eval", "predict",
                          "compare"}) {
    EXPECT_NE(help.output.find(cmd), std::string::npos) << cmd;
  }
  const auto version = Cli("--version");
  EXPECT_EQ(version.code, 0);
  EXPECT_NE(version.output.find('.'), std::string::npos);
}

TEST(Cli, ConfigErrors) {
  TempDir dir;
  EXPECT_EQ(Cli("--set train.stepz=4 stats").code, 4);
  EXPECT_EQ(Cli("--set train.steps=-4 stats").code, 4);
  Spit(dir.path() / "bad.ini", "[network]\nkernel = 4\n");
  EXPECT_EQ(Cli("--config " + dir.file("bad.ini") + " stats").code, 4);
  const auto missing = Cli("--config " + dir.file("missing.ini") + " stats");
  EXPECT_EQ(missing.code, 3);
  EXPECT_NE(missing.output.find("missing.ini"), std::string::npos);
}

TEST(Cli, MissingDatasetIsAnIoError) {
  TempDir dir;
  EXPECT_EQ(Cli("--set data.source=kitti --set data.root=/nonexistent/kitti --out " +
                dir.file("o") + " stats").code,
            3);
}

TEST(Cli, GroundTruthScoredAsPredictionsIsPerfect) {
  TempDir dir;
  const std::string kitti = KittiCopy(dir);
  const fs::path preds = dir.path() / "preds" / "sequences" / "01" / "predictions";
  fs::create_directories(preds);
  for (const auto& e : fs::directory_iterator(dir.path() / "data" / "sequences" / "01" / "labels")) {
    fs::copy_file(e.path(), preds / e.path().filename());
  }
  const auto r = Cli(kitti + " --out " + dir.file("scored") + " eval --predictions " +
                     dir.file("preds"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(Slurp(dir.path() / "scored" / "summary.csv"), "miou,accuracy\n1.000000,1.000000\n");
}

TEST(Cli, BrokenInputFilesMapToDistinctCodes) {
  TempDir dir;
  const std::string kitti = KittiCopy(dir);
  const fs::path seq = dir.path() / "data" / "sequences" / "01";
  const fs::path label = seq / "labels" / "000000.label";
  const fs::path scan = seq / "velodyne" / "000000.bin";
  const std::string good_label = Slurp(label), good_scan = Slurp(scan);
  const std::string run = kitti + " --out " + dir.file("o") + " upper-bound";

  Spit(label, good_label.substr(0, good_label.size() - 4));
  EXPECT_EQ(Cli(run).code, 6);  // label count differs from point count

  std::string unmapped = good_label;
  unmapped[0] = 77;
  Spit(label, unmapped);
  EXPECT_EQ(Cli(run).code, 8);

  Spit(label, good_label);
  Spit(scan, good_scan.substr(0, good_scan.size() - 3));
  EXPECT_EQ(Cli(run).code, 5);

  Spit(scan, good_scan);
  EXPECT_EQ(Cli(run).code, 0);
}

TEST(Cli, TrainPredictEval) {
  TempDir dir;
  const std::string quick = Quick(dir) + " --out " + dir.file("run");
  auto r = Cli(quick + " --seed 3 train --steps 2");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir.path() / "run" / "model.ckpt"));
  EXPECT_TRUE(fs::exists(dir.path() / "run" / "config.ini"));
  r = Cli(quick + " --seed 3 predict");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir.path() / "run" / "sequences" / "01" / "predictions" / "000001.label"));
  r = Cli(quick + " --seed 3 eval --checkpoint " + dir.file("nothing.ckpt"));
  EXPECT_EQ(r.code, 3) << r.output;
  // A checkpoint from a differently shaped model is rejected.
  r = Cli(Quick(dir) + " --set network.channels=8,12 --out " + dir.file("x") +
          " eval --checkpoint " + dir.file("run/model.ckpt"));
  EXPECT_EQ(r.code, 6) << r.output;
}

TEST(Cli, StatsAreIndependentOfThreadCount) {
  TempDir dir;
  ASSERT_EQ(Cli(Quick(dir) + " --out " + dir.file("a") + " --threads 1 stats").code, 0);
  ASSERT_EQ(Cli(Quick(dir) + " --out " + dir.file("b") + " --threads 3 stats").code, 0);
  EXPECT_EQ(Slurp(dir.path() / "a" / "stats_polar.csv"), Slurp(dir.path() / "b" / "stats_polar.csv"));
  EXPECT_FALSE(Slurp(dir.path() / "a" / "stats_polar.csv").empty());
}
