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

#ifndef POLARGRID_RING_CNN_HPP_
#define POLARGRID_RING_CNN_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "polargrid/encoder.hpp"
#include "polargrid/ring_conv.hpp"
#include "polargrid/tensor.hpp"

namespace polargrid {

struct RingCnnConfig {
  int in_channels = 64;
  // One encoder stage per entry; every stage after the first halves both
  // spatial axes, and the decoder mirrors them with skip concatenation.
  std::vector<int> channels = {32, 64, 128};
  int kernel = 3;
  int height_bins = 8;   // W_z
  int num_classes = 5;   // C
  // Wrap the azimuth axis. Callers clear this for grids without a circular
  // axis or when ring convolution is disabled.
  bool circular = true;
};

// Logits for every voxel, laid out (class, height, row, col). The head's
// (height_bins * num_classes) channels are this array read contiguously.
struct VoxelPrediction {
  Tensor3 logits;  // channels = num_classes * height_bins
  int num_classes = 0;
  int height_bins = 0;

  std::size_t voxels() const {
    return static_cast<std::size_t>(height_bins) * logits.plane_size();
  }
  double logit(int c, std::int64_t voxel_key) const {
    return logits.data[static_cast<std::size_t>(c) * voxels() + voxel_key];
  }
};

struct ConvLayerShape {
  std::string name;
  int in_channels = 0;
  int out_channels = 0;
  int kernel_rows = 1;
  int kernel_cols = 1;
  int out_rows = 0;
  int out_cols = 0;
  bool bias = true;
  bool batch_norm = false;
};

struct DenseLayerShape {
  std::string name;
  int in_width = 0;
  int out_width = 0;
  bool batch_norm = false;
};

struct CostSummary {
  std::int64_t params = 0;
  double macs = 0.0;
};

// params: weights + biases + batch-norm scale/shift.
// macs: conv layers at their output resolution, plus the per-point dense
// layers times the average number of points per scan.
CostSummary CountParamsAndMacs(const std::vector<ConvLayerShape>& conv_layers,
                               const std::vector<DenseLayerShape>& dense_layers = {},
                               double average_points = 0.0);

std::vector<DenseLayerShape> DenseShapes(const EncoderParams& params);

// Miniature Unet built from ring convolutions.
class RingCnn {
 public:
  struct Block {
    RingConv2d conv;
    BatchNorm2d bn;
  };
  struct BlockCache {
    RingConv2d::Cache conv;
    BatchNorm2d::Cache bn;
    Tensor3 output;  // post-ReLU
  };
  struct Cache {
    std::vector<BlockCache> down;
    std::vector<BlockCache> up;
    RingConv2d::Cache head;
    bool valid = false;
  };

  RingCnn() = default;
  RingCnn(const RingCnnConfig& config, std::mt19937_64& rng);

  const RingCnnConfig& config() const { return config_; }
  int downsample_factor() const;
  void set_circular(bool circular);

  // Training mode also advances batch-norm running statistics.
  VoxelPrediction Forward(const Tensor3& input, Mode mode, Cache* cache = nullptr);
  // Accumulates gradients; returns dL/d(input grid).
  Tensor3 Backward(const Cache& cache, const Tensor3& grad_logits);

  void ZeroGrad();
  std::vector<ParamView> Params(const std::string& prefix);
  std::vector<ConvLayerShape> LayerShapes(int rows, int cols) const;

  std::vector<Block>& down() { return down_; }
  std::vector<Block>& up() { return up_; }
  RingConv2d& head() { return head_; }

 private:
  RingCnnConfig config_;
  std::vector<Block> down_;  // down_[0] keeps resolution
  std::vector<Block> up_;    // up_[s] produces stage s resolution
  RingConv2d head_;
};

}  // namespace polargrid

#endif  // POLARGRID_RING_CNN_HPP_
