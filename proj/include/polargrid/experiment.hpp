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

#ifndef POLARGRID_EXPERIMENT_HPP_
#define POLARGRID_EXPERIMENT_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polargrid/config.hpp"
#include "polargrid/grid.hpp"
#include "polargrid/model.hpp"
#include "polargrid/scan_io.hpp"
#include "polargrid/synthetic.hpp"

namespace polargrid {

// Everything a run needs. Serialized as sectioned key-value text:
//
//   [data]      source (synth|kitti), root, label_map, train_sequences,
//               eval_sequences, max_scans, synth_spec, train_scans, eval_scans
//   [grid]      kind (cartesian|polar|spherical)
//   [grid.cartesian] / [grid.polar] / [grid.spherical]   GridSpec keys
//   [encoder]   widths, normalize
//   [network]   channels, kernel
//   [ablation]  ring_conv, nine_features, flip_augment, fixed_volume,
//               tuned_grid, untuned_cells
//   [train]     steps, learning_rate, momentum, weight_decay, batch,
//               class_weighting, log_every
//   [eval]      distance_edges, stats_bins, stats_min, stats_max,
//               checkpoint, predictions
//   [run]       seed, out, threads
struct ExperimentConfig {
  std::string source = "synth";
  std::string root;
  std::string label_map;
  std::vector<int> train_sequences = {0, 1, 2, 3, 4, 5, 6, 7, 9, 10};
  std::vector<int> eval_sequences = {8};
  int max_scans = 0;  // per split; 0 keeps every scan
  std::string synth_spec;  // empty selects the built-in scene
  int train_scans = 4;
  int eval_scans = 2;

  GridKind grid_kind = GridKind::kPolar;
  GridSpec cartesian;
  GridSpec polar;
  GridSpec spherical;

  std::vector<int> encoder_widths = {64, 128, 64};
  bool normalize_features = false;
  std::vector<int> channels = {32, 64, 128};
  int kernel = 3;

  bool ring_conv = true;
  bool nine_features = true;
  bool flip_augment = true;
  bool fixed_volume = true;
  bool tuned_grid = true;
  std::vector<int> untuned_cells = {64, 64, 8};

  int steps = 100;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
  int batch = 1;
  bool class_weighting = false;
  int log_every = 10;

  std::vector<double> distance_edges = {0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  int stats_bins = 40;
  double stats_min = 1.0;
  double stats_max = 50.0;
  std::string checkpoint;   // empty: <out>/model.ckpt
  std::string predictions;  // eval: score label files under this root

  std::uint64_t seed = 0;
  std::string out = "polargrid_out";
  int threads = 1;

  static ExperimentConfig Default();
  // Parse + Validate.
  static ExperimentConfig FromConfig(const KeyValueConfig& config);
  // Rejects unknown keys and malformed values only.
  static ExperimentConfig Parse(const KeyValueConfig& config);
  static ExperimentConfig FromFile(const std::string& path);
  KeyValueConfig ToConfig() const;
  void Validate() const;

  const GridSpec& grid(GridKind kind) const;
  // Active grid with the tuned-grid switch applied.
  GridSpec EffectiveGrid(GridKind kind) const;
  SegmenterConfig ModelConfig(GridKind kind, int num_classes,
                              std::optional<ClassId> ignore) const;
};

// Scans of one split, loaded lazily by index.
struct DatasetSplit {
  std::vector<std::string> sequence;  // two-digit id per scan
  std::vector<std::string> stem;      // file stem per scan, e.g. 000042
  std::function<Scan(std::size_t)> load;

  std::size_t size() const { return stem.size(); }
};

struct Dataset {
  LabelMap label_map;
  DatasetSplit train;
  DatasetSplit eval;
};

Dataset OpenDataset(const ExperimentConfig& config);

// Runs one of: synth, stats, purity, upper-bound, train, eval, predict,
// compare. Artifacts go to config.out together with config.ini; the
// returned text is a human-readable summary.
std::string RunCommand(const std::string& command, const ExperimentConfig& config);

const std::vector<std::string>& CommandNames();

}  // namespace polargrid

#endif  // POLARGRID_EXPERIMENT_HPP_
