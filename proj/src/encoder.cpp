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

#include "polargrid/encoder.hpp"

#include <cmath>

#include "polargrid/error.hpp"

namespace polargrid {

EncoderParams EncoderParams::Create(int input_width,
                                    const std::vector<int>& widths,
                                    std::mt19937_64& rng) {
  Require(input_width > 0, ErrorCode::kConfig, "encoder: input width must be positive");
  EncoderParams params;
  int in = input_width;
  for (int out : widths) {
    Require(out > 0, ErrorCode::kConfig, "encoder: layer widths must be positive");
    DenseLayer layer;
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / in));
    layer.weight.resize(out, in);
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = normal(rng);
      }
    }
    layer.bias = Vector::Zero(out);
    layer.gamma = Vector::Ones(out);
    layer.beta = Vector::Zero(out);
    layer.running_mean = Vector::Zero(out);
    layer.running_var = Vector::Ones(out);
    params.layers.push_back(std::move(layer));
    in = out;
  }
  params.ZeroGrad();
  return params;
}

int EncoderParams::input_width() const {
  return layers.empty() ? 0 : layers.front().in_width();
}

int EncoderParams::output_width() const {
  return layers.empty() ? 0 : layers.back().out_width();
}

void EncoderParams::Validate() const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& layer = layers[l];
    const auto out = layer.weight.rows();
    Require(layer.bias.size() == out, ErrorCode::kShapeMismatch,
            "encoder: bias width mismatch in layer " + std::to_string(l));
    if (l > 0) {
      Require(layer.weight.cols() == layers[l - 1].weight.rows(),
              ErrorCode::kShapeMismatch,
              "encoder: layer widths do not chain at layer " + std::to_string(l));
    }
    if (layer.batch_norm) {
      Require(layer.gamma.size() == out && layer.beta.size() == out &&
                  layer.running_mean.size() == out &&
                  layer.running_var.size() == out,
              ErrorCode::kShapeMismatch,
              "encoder: batch-norm width mismatch in layer " + std::to_string(l));
      Require((layer.running_var.array() > 0.0).all(), ErrorCode::kInvalidArgument,
              "encoder: running variances must be positive");
    }
  }
}

void EncoderParams::ZeroGrad() {
  for (DenseLayer& layer : layers) {
    layer.grad_weight = Matrix::Zero(layer.weight.rows(), layer.weight.cols());
    layer.grad_bias = Vector::Zero(layer.bias.size());
    layer.grad_gamma = Vector::Zero(layer.gamma.size());
    layer.grad_beta = Vector::Zero(layer.beta.size());
  }
}

std::vector<ParamView> EncoderParams::Params(const std::string& prefix) {
  std::vector<ParamView> views;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    DenseLayer& layer = layers[l];
    const std::string base = prefix + "layer" + std::to_string(l) + ".";
    const int out = layer.out_width();
    const int in = layer.in_width();
    views.push_back({base + "weight", {out, in}, layer.weight.data(),
                     layer.grad_weight.data(),
                     static_cast<std::size_t>(layer.weight.size())});
    views.push_back({base + "bias", {out}, layer.bias.data(),
                     layer.grad_bias.data(), static_cast<std::size_t>(out)});
    if (layer.batch_norm) {
      views.push_back({base + "bn.gamma", {out}, layer.gamma.data(),
                       layer.grad_gamma.data(), static_cast<std::size_t>(out)});
      views.push_back({base + "bn.beta", {out}, layer.beta.data(),
                       layer.grad_beta.data(), static_cast<std::size_t>(out)});
      views.push_back({base + "bn.running_mean", {out},
                       layer.running_mean.data(), nullptr,
                       static_cast<std::size_t>(out)});
      views.push_back({base + "bn.running_var", {out}, layer.running_var.data(),
                       nullptr, static_cast<std::size_t>(out)});
    }
  }
  return views;
}

Matrix EncoderForward(const EncoderParams& params, const Matrix& features,
                      Mode mode, EncoderCache* cache) {
  Require(!params.layers.empty(), ErrorCode::kState, "encoder: no layers");
  Require(features.cols() == params.input_width(), ErrorCode::kShapeMismatch,
          "encoder: feature width " + std::to_string(features.cols()) +
              " does not match input width " +
              std::to_string(params.input_width()));
  const Eigen::Index n = features.rows();
  Require(mode == Mode::kInference || n > 0, ErrorCode::kInvalidArgument,
          "encoder: training-mode batch norm needs at least one point");

  if (cache != nullptr) {
    cache->mode = mode;
    cache->input = features;
    cache->layers.assign(params.layers.size(), {});
    cache->valid = true;
  }

  Matrix x = features;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const DenseLayer& layer = params.layers[l];
    Matrix z = x * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    EncoderCache::Layer* slot = cache ? &cache->layers[l] : nullptr;

    if (layer.batch_norm) {
      Vector mean, var;
      if (mode == Mode::kTrain) {
        mean = z.colwise().mean().transpose();
        var = (z.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
      } else {
        mean = layer.running_mean;
        var = layer.running_var;
      }
      const Vector inv_std = (var.array() + kBatchNormEpsilon).rsqrt().matrix();
      Matrix xhat = (z.rowwise() - mean.transpose()) * inv_std.asDiagonal();
      z = xhat * layer.gamma.asDiagonal();
      z.rowwise() += layer.beta.transpose();
      if (slot) {
        slot->xhat = std::move(xhat);
        slot->inv_std = inv_std;
        if (mode == Mode::kTrain) {
          slot->batch_mean = mean;
          slot->batch_var = var;
        }
      }
    }
    if (layer.relu) z = z.cwiseMax(0.0);
    if (slot) slot->output = z;
    x = std::move(z);
  }
  return x;
}

void UpdateRunningStats(EncoderParams& params, const EncoderCache& cache,
                        double momentum) {
  Require(cache.valid && cache.mode == Mode::kTrain, ErrorCode::kState,
          "encoder: running statistics need a training-mode forward cache");
  const double n = static_cast<double>(cache.input.rows());
  const double unbias = n > 1 ? n / (n - 1) : 1.0;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    DenseLayer& layer = params.layers[l];
    if (!layer.batch_norm) continue;
    const auto& slot = cache.layers[l];
    layer.running_mean = (1 - momentum) * layer.running_mean + momentum * slot.batch_mean;
    layer.running_var =
        (1 - momentum) * layer.running_var + momentum * unbias * slot.batch_var;
  }
}

void EncoderBackward(EncoderParams& params, const EncoderCache& cache,
                     const Matrix& grad_output, Matrix* grad_features) {
  Require(cache.valid, ErrorCode::kState, "encoder: missing forward cache");
  Require(cache.layers.size() == params.layers.size(), ErrorCode::kState,
          "encoder: forward cache does not match parameters");
  Require(grad_output.rows() == cache.input.rows() &&
              grad_output.cols() == params.output_width(),
          ErrorCode::kShapeMismatch, "encoder: gradient shape mismatch");

  Matrix grad = grad_output;
  const double n = static_cast<double>(cache.input.rows());
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    DenseLayer& layer = params.layers[l];
    const auto& slot = cache.layers[l];
    if (layer.relu) {
      grad = (slot.output.array() > 0.0).select(grad, 0.0);
    }
    if (layer.batch_norm) {
      layer.grad_beta += grad.colwise().sum().transpose();
      layer.grad_gamma += (grad.array() * slot.xhat.array()).colwise().sum().matrix().transpose();
      Matrix dxhat = grad * layer.gamma.asDiagonal();
      if (cache.mode == Mode::kTrain) {
        const Eigen::RowVectorXd sum_d = dxhat.colwise().sum();
        const Eigen::RowVectorXd sum_dx =
            (dxhat.array() * slot.xhat.array()).colwise().sum();
        Matrix centered = n * dxhat;
        centered.rowwise() -= sum_d;
        centered -= slot.xhat * sum_dx.asDiagonal();
        grad = centered * (slot.inv_std / n).asDiagonal();
      } else {
        grad = dxhat * slot.inv_std.asDiagonal();
      }
    }
    const Matrix& input = l == 0 ? cache.input : cache.layers[l - 1].output;
    layer.grad_weight.noalias() += grad.transpose() * input;
    layer.grad_bias += grad.colwise().sum().transpose();
    if (l > 0 || grad_features != nullptr) {
      Matrix next = grad * layer.weight;
      grad = std::move(next);
    }
  }
  if (grad_features != nullptr) *grad_features = std::move(grad);
}

ScatterResult ScatterMax(const Matrix& point_vectors, const VoxelizedScan& vox) {
  Require(static_cast<std::size_t>(point_vectors.rows()) == vox.num_points(),
          ErrorCode::kShapeMismatch,
          "scatter max: vector count does not match point count");
  const GridSpec& spec = vox.spec;
  const int channels = static_cast<int>(point_vectors.cols());
  ScatterResult result;
  result.grid.values = Tensor3(channels, spec.rows(), spec.cols(), 0.0);
  result.grid.circular = spec.circular();
  result.grid.occupancy.assign(static_cast<std::size_t>(spec.num_cells_2d()), 0);
  const std::size_t cells = result.grid.values.plane_size();
  result.argmax.assign(static_cast<std::size_t>(channels) * cells, -1);

  for (std::size_t g = 0; g < vox.cells.size(); ++g) {
    const auto cell = static_cast<std::size_t>(vox.cells.keys[g]);
    const auto members = vox.cells.members(g);
    result.grid.occupancy[cell] = 1;
    for (int c = 0; c < channels; ++c) {
      // Members are ascending, so strict > keeps the smallest index on ties.
      std::int32_t best = members[0];
      double best_value = point_vectors(best, c);
      for (std::size_t m = 1; m < members.size(); ++m) {
        const double v = point_vectors(members[m], c);
        if (v > best_value) {
          best_value = v;
          best = members[m];
        }
      }
      result.grid.values.data[c * cells + cell] = best_value;
      result.argmax[c * cells + cell] = best;
    }
  }
  return result;
}

Matrix ScatterMaxBackward(const ScatterResult& scatter, std::size_t num_points,
                          const Tensor3& grad_grid) {
  Require(grad_grid.SameShape(scatter.grid.values), ErrorCode::kShapeMismatch,
          "scatter max backward: gradient shape mismatch");
  const std::size_t cells = grad_grid.plane_size();
  Matrix grad = Matrix::Zero(static_cast<Eigen::Index>(num_points),
                             grad_grid.channels);
  for (int c = 0; c < grad_grid.channels; ++c) {
    for (std::size_t cell = 0; cell < cells; ++cell) {
      const std::int32_t p = scatter.argmax[c * cells + cell];
      if (p >= 0) grad(p, c) += grad_grid.data[c * cells + cell];
    }
  }
  return grad;
}

}  // namespace polargrid
