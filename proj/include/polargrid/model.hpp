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

#ifndef POLARGRID_MODEL_HPP_
#define POLARGRID_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polargrid/encoder.hpp"
#include "polargrid/features.hpp"
#include "polargrid/grid.hpp"
#include "polargrid/optimizer.hpp"
#include "polargrid/ring_cnn.hpp"
#include "polargrid/scan_io.hpp"
#include "polargrid/voxel_loss.hpp"

namespace polargrid {

struct SegmenterConfig {
  GridSpec grid;
  FeatureOptions features;
  std::vector<int> encoder_widths = {64, 128, 64};
  std::vector<int> channels = {32, 64, 128};
  int kernel = 3;
  int num_classes = 5;
  std::optional<ClassId> ignore = 0;
  // Wrap the azimuth axis in every convolution (only meaningful for grids
  // with a circular axis).
  bool ring_conv = true;
  // When false every scan is voxelized within its own extent.
  bool fixed_volume = true;
};

// One scan voxelized and featurized for the segmenter.
struct PreparedScan {
  Scan scan;
  VoxelizedScan vox;
  Matrix features;
  std::vector<ClassId> labels;  // empty for unlabeled scans
};

struct TrainStepResult {
  double loss = 0.0;  // mean over the batch
  std::int64_t counted_voxels = 0;
  std::int64_t correct_voxels = 0;
};

// Per-point encoder, scatter-max, ring CNN and voxel head.
class Segmenter {
 public:
  Segmenter(const SegmenterConfig& config, std::uint64_t seed);

  const SegmenterConfig& config() const { return config_; }
  EncoderParams& encoder() { return encoder_; }
  RingCnn& network() { return network_; }

  PreparedScan Prepare(const Scan& scan) const;

  VoxelPrediction Forward(const PreparedScan& prepared, Mode mode);

  // Zeroes gradients, backpropagates the batch-mean loss and applies one
  // optimizer step. Batch-norm layers normalize each scan on its own.
  TrainStepResult TrainStep(std::span<const PreparedScan> batch,
                            SgdOptimizer& optimizer,
                            std::span<const double> class_weights = {});

  // Inference-mode loss and voxel accuracy; parameters are not touched.
  VoxelLossResult Evaluate(const PreparedScan& prepared,
                           std::span<const double> class_weights = {});
  // Per-point labels; the ignore class is never predicted.
  std::vector<ClassId> Predict(const PreparedScan& prepared);

  std::vector<ParamView> Params();
  void ZeroGrad();

  void Save(const std::string& path, const std::string& metadata);
  // Returns the stored metadata.
  std::string Load(const std::string& path);

  CostSummary Cost(double average_points) const;

 private:
  SegmenterConfig config_;
  GridSpec grid_;  // config grid adjusted for network divisibility checks
  EncoderParams encoder_;
  RingCnn network_;
};

// Inverse log-frequency weights 1 / ln(1.02 + f_c); the ignore class gets 0.
std::vector<double> InverseLogFrequencyWeights(
    std::span<const std::int64_t> class_counts, std::optional<ClassId> ignore);

}  // namespace polargrid

#endif  // POLARGRID_MODEL_HPP_
