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

// Command-line front end. Talks to the library only through the C API.

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polargrid/polargrid.h"

namespace {

// Exit codes are part of the public interface.
enum ExitCode {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitConfig = 4,
  kExitFormat = 5,
  kExitShape = 6,
  kExitNumeric = 7,
  kExitUnmappedLabel = 8,
};

int ExitCodeFor(pg_status status) {
  switch (status) {
    case PG_OK:
      return kExitOk;
    case PG_ERR_INVALID_ARGUMENT:
      return kExitUsage;
    case PG_ERR_IO:
      return kExitIo;
    case PG_ERR_CONFIG:
      return kExitConfig;
    case PG_ERR_FORMAT:
    case PG_ERR_NON_FINITE:
      return kExitFormat;
    case PG_ERR_SIZE_MISMATCH:
    case PG_ERR_SHAPE_MISMATCH:
      return kExitShape;
    case PG_ERR_NUMERIC:
      return kExitNumeric;
    case PG_ERR_UNMAPPED_LABEL:
      return kExitUnmappedLabel;
    default:
      return kExitInternal;
  }
}

struct Options {
  std::string config;
  std::string grid;
  std::string seed;
  std::string out;
  std::string steps;
  std::string checkpoint;
  std::string predictions;
  std::string threads;
  std::vector<std::string> overrides;
};

int Fail(pg_status status) {
  std::fprintf(stderr, "polargrid: %s: %s\n", pg_status_name(status),
               pg_last_error());
  return ExitCodeFor(status);
}

int Run(const std::string& command, const Options& opt) {
  pg_experiment* exp = nullptr;
  pg_status st = opt.config.empty() ? pg_experiment_default(&exp)
                                    : pg_experiment_load(opt.config.c_str(), &exp);
  if (st != PG_OK) return Fail(st);

  std::vector<std::array<std::string, 3>> sets;
  auto add = [&sets](const char* section, const char* key, const std::string& value) {
    if (!value.empty()) sets.push_back({section, key, value});
  };
  add("grid", "kind", opt.grid);
  add("run", "seed", opt.seed);
  add("run", "out", opt.out);
  add("run", "threads", opt.threads);
  add("train", "steps", opt.steps);
  add("eval", "checkpoint", opt.checkpoint);
  add("eval", "predictions", opt.predictions);
  for (const std::string& o : opt.overrides) {
    const auto eq = o.find('=');
    const auto dot = o.rfind('.', eq);
    if (eq == std::string::npos || dot == std::string::npos || dot == 0) {
      std::fprintf(stderr, "polargrid: --set expects section.key=value, got '%s'\n",
                   o.c_str());
      pg_experiment_free(exp);
      return kExitUsage;
    }
    sets.push_back({o.substr(0, dot), o.substr(dot + 1, eq - dot - 1), o.substr(eq + 1)});
  }
  for (const auto& [section, key, value] : sets) {
    st = pg_experiment_set(exp, section.c_str(), key.c_str(), value.c_str());
    if (st != PG_OK) {
      pg_experiment_free(exp);
      return Fail(st);
    }
  }

  char* report = nullptr;
  st = pg_experiment_run(exp, command.c_str(), &report);
  pg_experiment_free(exp);
  if (st != PG_OK) return Fail(st);
  std::fputs(report, stdout);
  pg_string_free(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR grid representations: partition statistics, training and evaluation"};
  app.set_version_flag("--version", std::string(pg_version()));
  app.require_subcommand(1);

  Options opt;
  app.add_option("--config", opt.config, "Experiment config file");
  app.add_option("--grid", opt.grid, "Active grid kind")
      ->check(CLI::IsMember({"cartesian", "polar", "spherical"}));
  app.add_option("--seed", opt.seed, "Root seed")->check(CLI::NonNegativeNumber);
  app.add_option("--out", opt.out, "Output directory");
  app.add_option("--threads", opt.threads, "Worker threads for per-scan work")
      ->check(CLI::PositiveNumber);
  app.add_option("--set", opt.overrides, "Config override section.key=value (repeatable)");

  struct Command {
    const char* name;
    const char* help;
  };
  const std::vector<Command> commands = {
      {"synth", "Write a labeled synthetic dataset in KITTI layout"},
      {"stats", "Points-per-cell statistics for every grid kind"},
      {"purity", "Voxel label purity for every grid kind"},
      {"upper-bound", "mIoU of the per-voxel majority-label oracle"},
      {"train", "Train the segmenter, write checkpoint, loss log and metrics"},
      {"eval", "Score a checkpoint or a directory of predictions"},
      {"predict", "Write .label predictions for the evaluation split"},
      {"compare", "Train and evaluate every grid kind on the same data"},
  };
  std::string chosen;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    const std::string name = c.name;
    sub->callback([&chosen, name] { chosen = name; });
    if (name == "train" || name == "compare") {
      sub->add_option("--steps", opt.steps, "Training steps")->check(CLI::NonNegativeNumber);
    }
    if (name == "eval" || name == "predict") {
      sub->add_option("--checkpoint", opt.checkpoint, "Checkpoint (default <out>/model.ckpt)");
    }
    if (name == "eval") {
      sub->add_option("--predictions", opt.predictions,
                      "Score label files under <dir>/sequences/NN/predictions");
    }
  }
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  return Run(chosen, opt);
}
