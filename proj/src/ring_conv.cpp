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

#include "polargrid/ring_conv.hpp"

#include <cmath>

#include "polargrid/error.hpp"

namespace polargrid {

RingConv2d::RingConv2d(int in_channels, int out_channels, int kernel_rows,
                       int kernel_cols, int stride_rows, int stride_cols,
                       bool circular)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_rows_(kernel_rows),
      kernel_cols_(kernel_cols),
      stride_rows_(stride_rows),
      stride_cols_(stride_cols),
      circular_(circular) {
  Require(in_channels > 0 && out_channels > 0 && kernel_rows > 0 &&
              kernel_cols > 0 && stride_rows > 0 && stride_cols > 0,
          ErrorCode::kConfig,
          "ring conv: channel, kernel and stride sizes must be positive");
  weight = Matrix::Zero(out_channels, in_channels * kernel_rows * kernel_cols);
  bias = Vector::Zero(out_channels);
  ZeroGrad();
}

void RingConv2d::Initialize(std::mt19937_64& rng) {
  const double fan_in = static_cast<double>(weight.cols());
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / fan_in));
  for (Eigen::Index r = 0; r < weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < weight.cols(); ++c) weight(r, c) = normal(rng);
  }
  bias.setZero();
}

void RingConv2d::ZeroGrad() {
  grad_weight = Matrix::Zero(weight.rows(), weight.cols());
  grad_bias = Vector::Zero(bias.size());
}

std::pair<int, int> RingConv2d::OutputSize(int rows, int cols) const {
  const int pad_r = kernel_rows_ / 2;
  const int pad_c = kernel_cols_ / 2;
  const int padded_r = rows + 2 * pad_r;
  const int padded_c = cols + 2 * pad_c;
  Require(rows > 0 && cols > 0, ErrorCode::kShapeMismatch,
          "ring conv: empty input");
  Require(padded_r >= kernel_rows_ && padded_c >= kernel_cols_,
          ErrorCode::kShapeMismatch,
          "ring conv: kernel larger than padded input");
  return {(padded_r - kernel_rows_) / stride_rows_ + 1,
          (padded_c - kernel_cols_) / stride_cols_ + 1};
}

Tensor3 RingConv2d::Forward(const Tensor3& input, Cache* cache) const {
  Require(input.channels == in_channels_, ErrorCode::kShapeMismatch,
          "ring conv: expected " + std::to_string(in_channels_) +
              " input channels, got " + std::to_string(input.channels));
  const auto [out_rows, out_cols] = OutputSize(input.rows, input.cols);
  const int pad_r = kernel_rows_ / 2;
  const int pad_c = kernel_cols_ / 2;
  const int positions = out_rows * out_cols;
  const int W = input.cols;

  Matrix columns(static_cast<Eigen::Index>(in_channels_) * kernel_rows_ * kernel_cols_,
                 positions);
  for (int ci = 0; ci < in_channels_; ++ci) {
    for (int a = 0; a < kernel_rows_; ++a) {
      for (int b = 0; b < kernel_cols_; ++b) {
        double* row =
            columns.row((ci * kernel_rows_ + a) * kernel_cols_ + b).data();
        for (int oh = 0; oh < out_rows; ++oh) {
          const int h = oh * stride_rows_ - pad_r + a;
          double* dst = row + oh * out_cols;
          if (h < 0 || h >= input.rows) {
            std::fill(dst, dst + out_cols, 0.0);
            continue;
          }
          const double* src = input.data.data() +
                              (static_cast<std::size_t>(ci) * input.rows + h) * W;
          for (int ow = 0; ow < out_cols; ++ow) {
            int w = ow * stride_cols_ - pad_c + b;
            if (w < 0 || w >= W) {
              if (!circular_) {
                dst[ow] = 0.0;
                continue;
              }
              w = ((w % W) + W) % W;
            }
            dst[ow] = src[w];
          }
        }
      }
    }
  }

  Tensor3 out(out_channels_, out_rows, out_cols);
  auto out_mat = out.AsMatrix();
  out_mat.noalias() = weight * columns;
  out_mat.colwise() += bias;
  if (cache != nullptr) {
    cache->columns = std::move(columns);
    cache->in_rows = input.rows;
    cache->in_cols = input.cols;
    cache->out_rows = out_rows;
    cache->out_cols = out_cols;
    cache->valid = true;
  }
  return out;
}

Tensor3 RingConv2d::Backward(const Cache& cache, const Tensor3& grad_output) {
  Require(cache.valid, ErrorCode::kState, "ring conv: missing forward cache");
  Require(grad_output.channels == out_channels_ &&
              grad_output.rows == cache.out_rows &&
              grad_output.cols == cache.out_cols,
          ErrorCode::kShapeMismatch, "ring conv: gradient shape mismatch");
  const auto g = grad_output.AsMatrix();
  grad_weight.noalias() += g * cache.columns.transpose();
  grad_bias += g.rowwise().sum();
  const Matrix grad_columns = weight.transpose() * g;

  const int pad_r = kernel_rows_ / 2;
  const int pad_c = kernel_cols_ / 2;
  const int W = cache.in_cols;
  Tensor3 grad_input(in_channels_, cache.in_rows, cache.in_cols);
  for (int ci = 0; ci < in_channels_; ++ci) {
    for (int a = 0; a < kernel_rows_; ++a) {
      for (int b = 0; b < kernel_cols_; ++b) {
        const double* row =
            grad_columns.row((ci * kernel_rows_ + a) * kernel_cols_ + b).data();
        for (int oh = 0; oh < cache.out_rows; ++oh) {
          const int h = oh * stride_rows_ - pad_r + a;
          if (h < 0 || h >= cache.in_rows) continue;
          const double* src = row + oh * cache.out_cols;
          double* dst = grad_input.data.data() +
                        (static_cast<std::size_t>(ci) * cache.in_rows + h) * W;
          for (int ow = 0; ow < cache.out_cols; ++ow) {
            int w = ow * stride_cols_ - pad_c + b;
            if (w < 0 || w >= W) {
              if (!circular_) continue;
              w = ((w % W) + W) % W;
            }
            dst[w] += src[ow];
          }
        }
      }
    }
  }
  return grad_input;
}

BatchNorm2d::BatchNorm2d(int channels)
    : gamma(Vector::Ones(channels)),
      beta(Vector::Zero(channels)),
      running_mean(Vector::Zero(channels)),
      running_var(Vector::Ones(channels)) {
  ZeroGrad();
}

void BatchNorm2d::ZeroGrad() {
  grad_gamma = Vector::Zero(gamma.size());
  grad_beta = Vector::Zero(beta.size());
}

Tensor3 BatchNorm2d::Forward(const Tensor3& input, Mode mode, Cache* cache,
                             bool update_running) {
  Require(input.channels == channels(), ErrorCode::kShapeMismatch,
          "batch norm: channel mismatch");
  const auto x = input.AsMatrix();
  const double n = static_cast<double>(input.plane_size());
  Vector mean, var;
  if (mode == Mode::kTrain) {
    mean = x.rowwise().mean();
    var = (x.colwise() - mean).array().square().rowwise().mean();
    if (update_running) {
      const double unbias = n > 1 ? n / (n - 1) : 1.0;
      running_mean = (1 - momentum) * running_mean + momentum * mean;
      running_var = (1 - momentum) * running_var + momentum * unbias * var;
    }
  } else {
    mean = running_mean;
    var = running_var;
  }
  const Vector inv_std = (var.array() + epsilon).rsqrt().matrix();
  Matrix xhat = inv_std.asDiagonal() * (x.colwise() - mean);
  Tensor3 out(input.channels, input.rows, input.cols);
  auto y = out.AsMatrix();
  y.noalias() = gamma.asDiagonal() * xhat;
  y.colwise() += beta;
  if (cache != nullptr) {
    cache->xhat = std::move(xhat);
    cache->inv_std = inv_std;
    cache->mode = mode;
    cache->valid = true;
  }
  return out;
}

Tensor3 BatchNorm2d::Backward(const Cache& cache, const Tensor3& grad_output) {
  Require(cache.valid, ErrorCode::kState, "batch norm: missing forward cache");
  const auto g = grad_output.AsMatrix();
  Require(g.rows() == cache.xhat.rows() && g.cols() == cache.xhat.cols(),
          ErrorCode::kShapeMismatch, "batch norm: gradient shape mismatch");
  grad_beta += g.rowwise().sum();
  grad_gamma += (g.array() * cache.xhat.array()).rowwise().sum().matrix();
  const Matrix dxhat = gamma.asDiagonal() * g;
  Tensor3 grad_input(grad_output.channels, grad_output.rows, grad_output.cols);
  auto dx = grad_input.AsMatrix();
  if (cache.mode == Mode::kTrain) {
    const double n = static_cast<double>(g.cols());
    const Vector sum_d = dxhat.rowwise().sum();
    const Vector sum_dx = (dxhat.array() * cache.xhat.array()).rowwise().sum();
    dx = n * dxhat;
    dx.colwise() -= sum_d;
    dx -= sum_dx.asDiagonal() * cache.xhat;
    dx = (cache.inv_std / n).asDiagonal() * dx;
  } else {
    dx = cache.inv_std.asDiagonal() * dxhat;
  }
  return grad_input;
}

void ReluInPlace(Tensor3& t) {
  for (double& v : t.data) v = v > 0.0 ? v : 0.0;
}

void ReluBackwardInPlace(const Tensor3& output, Tensor3& grad) {
  for (std::size_t n = 0; n < grad.data.size(); ++n) {
    if (!(output.data[n] > 0.0)) grad.data[n] = 0.0;
  }
}

Tensor3 Upsample2x(const Tensor3& input) {
  Tensor3 out(input.channels, input.rows * 2, input.cols * 2);
  for (int c = 0; c < input.channels; ++c) {
    for (int h = 0; h < out.rows; ++h) {
      for (int w = 0; w < out.cols; ++w) out.at(c, h, w) = input.at(c, h / 2, w / 2);
    }
  }
  return out;
}

Tensor3 Upsample2xBackward(const Tensor3& grad_output) {
  Require(grad_output.rows % 2 == 0 && grad_output.cols % 2 == 0,
          ErrorCode::kShapeMismatch, "upsample backward: odd gradient size");
  Tensor3 grad(grad_output.channels, grad_output.rows / 2, grad_output.cols / 2);
  for (int c = 0; c < grad_output.channels; ++c) {
    for (int h = 0; h < grad_output.rows; ++h) {
      for (int w = 0; w < grad_output.cols; ++w) {
        grad.at(c, h / 2, w / 2) += grad_output.at(c, h, w);
      }
    }
  }
  return grad;
}

Tensor3 ConcatChannels(const Tensor3& a, const Tensor3& b) {
  Require(a.rows == b.rows && a.cols == b.cols, ErrorCode::kShapeMismatch,
          "concat: spatial sizes differ");
  Tensor3 out(a.channels + b.channels, a.rows, a.cols);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
  return out;
}

std::pair<Tensor3, Tensor3> SplitChannels(const Tensor3& t, int first_channels) {
  Require(first_channels >= 0 && first_channels <= t.channels,
          ErrorCode::kShapeMismatch, "split: channel count out of range");
  Tensor3 a(first_channels, t.rows, t.cols);
  Tensor3 b(t.channels - first_channels, t.rows, t.cols);
  std::copy(t.data.begin(), t.data.begin() + a.data.size(), a.data.begin());
  std::copy(t.data.begin() + a.data.size(), t.data.end(), b.data.begin());
  return {std::move(a), std::move(b)};
}

Tensor3 RollColumns(const Tensor3& t, int shift) {
  Tensor3 out(t.channels, t.rows, t.cols);
  const int W = t.cols;
  const int s = ((shift % W) + W) % W;
  for (int c = 0; c < t.channels; ++c) {
    for (int h = 0; h < t.rows; ++h) {
      for (int w = 0; w < W; ++w) out.at(c, h, (w + s) % W) = t.at(c, h, w);
    }
  }
  return out;
}

}  // namespace polargrid
