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

#ifndef POLARGRID_RING_CONV_HPP_
#define POLARGRID_RING_CONV_HPP_

#include <random>
#include <utility>

#include "polargrid/tensor.hpp"

namespace polargrid {

// 2D cross-correlation over (rows, cols) with "same" padding of
// kernel/2 on each axis. Rows are always zero padded; cols wrap around
// when circular is set (the ring convolution) and are zero padded otherwise.
class RingConv2d {
 public:
  struct Cache {
    Matrix columns;  // (in * kh * kw) x (out_rows * out_cols)
    int in_rows = 0;
    int in_cols = 0;
    int out_rows = 0;
    int out_cols = 0;
    bool valid = false;
  };

  RingConv2d() = default;
  RingConv2d(int in_channels, int out_channels, int kernel_rows,
             int kernel_cols, int stride_rows, int stride_cols, bool circular);

  // He-normal weights, zero bias.
  void Initialize(std::mt19937_64& rng);

  int in_channels() const { return in_channels_; }
  int out_channels() const { return out_channels_; }
  int kernel_rows() const { return kernel_rows_; }
  int kernel_cols() const { return kernel_cols_; }
  int stride_rows() const { return stride_rows_; }
  int stride_cols() const { return stride_cols_; }
  bool circular() const { return circular_; }
  void set_circular(bool circular) { circular_ = circular; }

  std::pair<int, int> OutputSize(int rows, int cols) const;

  Tensor3 Forward(const Tensor3& input, Cache* cache = nullptr) const;
  // Accumulates weight and bias gradients; returns dL/d(input).
  Tensor3 Backward(const Cache& cache, const Tensor3& grad_output);

  void ZeroGrad();

  // out x (in * kh * kw); element (o, (i * kh + a) * kw + b).
  Matrix weight;
  Vector bias;
  Matrix grad_weight;
  Vector grad_bias;

 private:
  int in_channels_ = 0;
  int out_channels_ = 0;
  int kernel_rows_ = 1;
  int kernel_cols_ = 1;
  int stride_rows_ = 1;
  int stride_cols_ = 1;
  bool circular_ = true;
};

// Per-channel batch norm over all (row, col) positions of one grid.
class BatchNorm2d {
 public:
  struct Cache {
    Matrix xhat;  // channels x positions
    Vector inv_std;
    Mode mode = Mode::kInference;
    bool valid = false;
  };

  BatchNorm2d() = default;
  explicit BatchNorm2d(int channels);

  int channels() const { return static_cast<int>(gamma.size()); }

  // Training mode normalizes with the grid's own statistics and folds them
  // into the running estimates.
  Tensor3 Forward(const Tensor3& input, Mode mode, Cache* cache = nullptr,
                  bool update_running = true);
  Tensor3 Backward(const Cache& cache, const Tensor3& grad_output);
  void ZeroGrad();

  Vector gamma;
  Vector beta;
  Vector running_mean;
  Vector running_var;
  Vector grad_gamma;
  Vector grad_beta;
  double momentum = 0.1;
  double epsilon = 1e-5;
};

void ReluInPlace(Tensor3& t);
// Zeroes grad where the (post-ReLU) output is not positive.
void ReluBackwardInPlace(const Tensor3& output, Tensor3& grad);

Tensor3 Upsample2x(const Tensor3& input);
Tensor3 Upsample2xBackward(const Tensor3& grad_output);

Tensor3 ConcatChannels(const Tensor3& a, const Tensor3& b);
std::pair<Tensor3, Tensor3> SplitChannels(const Tensor3& t, int first_channels);

// Rotates every row by shift columns: out(:, :, (w + shift) mod W) = in(:, :, w).
Tensor3 RollColumns(const Tensor3& t, int shift);

}  // namespace polargrid

#endif  // POLARGRID_RING_CONV_HPP_
