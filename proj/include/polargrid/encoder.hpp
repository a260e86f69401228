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

#ifndef POLARGRID_ENCODER_HPP_
#define POLARGRID_ENCODER_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "polargrid/grid.hpp"
#include "polargrid/tensor.hpp"

namespace polargrid {

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

// Fully connected layer, then optional batch norm, then optional ReLU.
struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;
  bool batch_norm = true;
  bool relu = true;
  Vector gamma;
  Vector beta;
  Vector running_mean;
  Vector running_var;

  Matrix grad_weight;
  Vector grad_bias;
  Vector grad_gamma;
  Vector grad_beta;

  int in_width() const { return static_cast<int>(weight.cols()); }
  int out_width() const { return static_cast<int>(weight.rows()); }
};

// The per-point network h: only fully connected, batch-norm and ReLU layers.
struct EncoderParams {
  std::vector<DenseLayer> layers;

  // widths = hidden and output widths, e.g. {64, 128, 64}.
  static EncoderParams Create(int input_width, const std::vector<int>& widths,
                              std::mt19937_64& rng);

  int input_width() const;
  int output_width() const;
  void Validate() const;
  void ZeroGrad();
  std::vector<ParamView> Params(const std::string& prefix);
};

struct EncoderCache {
  struct Layer {
    Matrix xhat;           // normalized pre-activations (batch norm only)
    Vector inv_std;        // 1/sqrt(var + eps) used in the forward pass
    Vector batch_mean;     // training-mode statistics
    Vector batch_var;      // biased
    Matrix output;         // post-activation
  };
  Mode mode = Mode::kInference;
  Matrix input;
  std::vector<Layer> layers;
  bool valid = false;
};

// Applies h to every point independently. In training mode batch norm uses
// the statistics of all points passed in; in inference mode the running ones.
Matrix EncoderForward(const EncoderParams& params, const Matrix& features,
                      Mode mode, EncoderCache* cache = nullptr);

// running = (1 - momentum) * running + momentum * batch (unbiased variance).
void UpdateRunningStats(EncoderParams& params, const EncoderCache& cache,
                        double momentum = kBatchNormMomentum);

// Accumulates parameter gradients from dL/d(outputs). Returns dL/d(features)
// when requested.
void EncoderBackward(EncoderParams& params, const EncoderCache& cache,
                     const Matrix& grad_output, Matrix* grad_features = nullptr);

struct ScatterResult {
  FeatureGrid grid;
  // Contributing point per (channel, cell), flat index channel * cells + cell;
  // -1 for empty cells.
  std::vector<std::int32_t> argmax;
};

// Channel-wise max over the points of each 2D cell. Ties go to the smallest
// point index; empty cells are filled with zero.
ScatterResult ScatterMax(const Matrix& point_vectors, const VoxelizedScan& vox);

// Routes each (cell, channel) gradient to its argmax point.
Matrix ScatterMaxBackward(const ScatterResult& scatter, std::size_t num_points,
                          const Tensor3& grad_grid);

}  // namespace polargrid

#endif  // POLARGRID_ENCODER_HPP_
