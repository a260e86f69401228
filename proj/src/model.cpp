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

#include "polargrid/model.hpp"

#include <cmath>

#include "polargrid/checkpoint.hpp"
#include "polargrid/error.hpp"
#include "polargrid/rng.hpp"

namespace polargrid {
namespace {

RingCnnConfig NetworkConfig(const SegmenterConfig& config) {
  RingCnnConfig net;
  net.in_channels = config.encoder_widths.back();
  net.channels = config.channels;
  net.kernel = config.kernel;
  net.height_bins = config.grid.heights();
  net.num_classes = config.num_classes;
  net.circular = config.ring_conv && config.grid.circular();
  return net;
}

}  // namespace

Segmenter::Segmenter(const SegmenterConfig& config, std::uint64_t seed)
    : config_(config), grid_(config.grid) {
  config_.grid.Validate();
  Require(!config_.encoder_widths.empty(), ErrorCode::kConfig,
          "encoder needs at least one layer");
  Require(config_.num_classes >= 1, ErrorCode::kConfig,
          "class count must be positive");
  std::mt19937_64 encoder_rng = StreamFor(seed, 0x656e63);
  std::mt19937_64 network_rng = StreamFor(seed, 0x6e6574);
  encoder_ = EncoderParams::Create(FeatureWidth(config_.features),
                                   config_.encoder_widths, encoder_rng);
  network_ = RingCnn(NetworkConfig(config_), network_rng);
  const int factor = network_.downsample_factor();
  if (grid_.rows() % factor != 0 || grid_.cols() % factor != 0) {
    Fail(ErrorCode::kShapeMismatch,
         "grid " + std::to_string(grid_.rows()) + "x" + std::to_string(grid_.cols()) +
             " is not divisible by the network downsample factor " +
             std::to_string(factor));
  }
}

PreparedScan Segmenter::Prepare(const Scan& scan) const {
  PreparedScan out;
  out.scan = scan;
  const GridSpec spec =
      config_.fixed_volume ? config_.grid : FitBoundsToScan(config_.grid, scan);
  out.vox = Quantize(scan, spec);
  out.features = BuildPointFeatures(scan, out.vox, config_.features);
  if (scan.labels) out.labels = *scan.labels;
  return out;
}

VoxelPrediction Segmenter::Forward(const PreparedScan& prepared, Mode mode) {
  const Matrix points = EncoderForward(encoder_, prepared.features, mode);
  const ScatterResult scatter = ScatterMax(points, prepared.vox);
  return network_.Forward(scatter.grid.values, mode);
}

TrainStepResult Segmenter::TrainStep(std::span<const PreparedScan> batch,
                                     SgdOptimizer& optimizer,
                                     std::span<const double> class_weights) {
  Require(!batch.empty(), ErrorCode::kInvalidArgument, "train step: empty batch");
  ZeroGrad();
  TrainStepResult result;
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (const PreparedScan& sample : batch) {
    Require(!sample.labels.empty(), ErrorCode::kInvalidArgument,
            "train step: scan has no labels");
    EncoderCache encoder_cache;
    const Matrix points =
        EncoderForward(encoder_, sample.features, Mode::kTrain, &encoder_cache);
    const ScatterResult scatter = ScatterMax(points, sample.vox);
    RingCnn::Cache net_cache;
    const VoxelPrediction pred =
        network_.Forward(scatter.grid.values, Mode::kTrain, &net_cache);
    VoxelLossResult loss = VoxelLoss(pred, sample.vox, sample.labels,
                                     config_.ignore, class_weights);
    if (!std::isfinite(loss.loss)) {
      Fail(ErrorCode::kNumeric, "train step: loss is not finite");
    }
    result.loss += scale * loss.loss;
    result.counted_voxels += loss.counted_voxels;
    result.correct_voxels += loss.correct_voxels;

    for (double& g : loss.grad.data) g *= scale;
    const Tensor3 grad_grid = network_.Backward(net_cache, loss.grad);
    const Matrix grad_points =
        ScatterMaxBackward(scatter, sample.features.rows(), grad_grid);
    EncoderBackward(encoder_, encoder_cache, grad_points);
    UpdateRunningStats(encoder_, encoder_cache);
  }
  optimizer.Step(Params());
  return result;
}

VoxelLossResult Segmenter::Evaluate(const PreparedScan& prepared,
                                    std::span<const double> class_weights) {
  const VoxelPrediction pred = Forward(prepared, Mode::kInference);
  return VoxelLoss(pred, prepared.vox, prepared.labels, config_.ignore,
                   class_weights);
}

std::vector<ClassId> Segmenter::Predict(const PreparedScan& prepared) {
  const VoxelPrediction pred = Forward(prepared, Mode::kInference);
  return DecodeToPoints(pred, prepared.vox, config_.ignore);
}

std::vector<ParamView> Segmenter::Params() {
  std::vector<ParamView> params = encoder_.Params("encoder.");
  for (auto& p : network_.Params("network.")) params.push_back(std::move(p));
  return params;
}

void Segmenter::ZeroGrad() {
  encoder_.ZeroGrad();
  network_.ZeroGrad();
}

void Segmenter::Save(const std::string& path, const std::string& metadata) {
  SaveCheckpoint(path, metadata, Params());
}

std::string Segmenter::Load(const std::string& path) {
  const Checkpoint ckpt = ReadCheckpoint(path);
  RestoreParams(ckpt, Params());
  return ckpt.metadata;
}

CostSummary Segmenter::Cost(double average_points) const {
  return CountParamsAndMacs(network_.LayerShapes(grid_.rows(), grid_.cols()),
                            DenseShapes(encoder_), average_points);
}

std::vector<double> InverseLogFrequencyWeights(
    std::span<const std::int64_t> class_counts, std::optional<ClassId> ignore) {
  std::int64_t total = 0;
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    if (ignore && c == *ignore) continue;
    total += class_counts[c];
  }
  std::vector<double> weights(class_counts.size(), 0.0);
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    if (ignore && c == *ignore) continue;
    const double f = total > 0 ? static_cast<double>(class_counts[c]) / total : 0.0;
    weights[c] = 1.0 / std::log(1.02 + f);
  }
  return weights;
}

}  // namespace polargrid
