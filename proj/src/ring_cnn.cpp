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

#include "polargrid/ring_cnn.hpp"

#include <tuple>

#include "polargrid/error.hpp"

namespace polargrid {
namespace {

Tensor3 BlockForward(RingCnn::Block& block, const Tensor3& input, Mode mode,
                     RingCnn::BlockCache* cache) {
  Tensor3 x = block.conv.Forward(input, cache ? &cache->conv : nullptr);
  x = block.bn.Forward(x, mode, cache ? &cache->bn : nullptr);
  ReluInPlace(x);
  if (cache) cache->output = x;
  return x;
}

Tensor3 BlockBackward(RingCnn::Block& block, const RingCnn::BlockCache& cache,
                      Tensor3 grad) {
  ReluBackwardInPlace(cache.output, grad);
  grad = block.bn.Backward(cache.bn, grad);
  return block.conv.Backward(cache.conv, grad);
}

void AddInPlace(Tensor3& into, const Tensor3& other) {
  for (std::size_t n = 0; n < into.data.size(); ++n) into.data[n] += other.data[n];
}

}  // namespace

CostSummary CountParamsAndMacs(const std::vector<ConvLayerShape>& conv_layers,
                               const std::vector<DenseLayerShape>& dense_layers,
                               double average_points) {
  CostSummary cost;
  for (const auto& l : conv_layers) {
    const std::int64_t taps = static_cast<std::int64_t>(l.out_channels) *
                              l.in_channels * l.kernel_rows * l.kernel_cols;
    cost.params += taps + (l.bias ? l.out_channels : 0) +
                   (l.batch_norm ? 2 * l.out_channels : 0);
    cost.macs += static_cast<double>(taps) * l.out_rows * l.out_cols;
  }
  for (const auto& l : dense_layers) {
    const std::int64_t taps = static_cast<std::int64_t>(l.in_width) * l.out_width;
    cost.params += taps + l.out_width + (l.batch_norm ? 2 * l.out_width : 0);
    cost.macs += static_cast<double>(taps) * average_points;
  }
  return cost;
}

std::vector<DenseLayerShape> DenseShapes(const EncoderParams& params) {
  std::vector<DenseLayerShape> shapes;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    shapes.push_back({"encoder.layer" + std::to_string(l), layer.in_width(),
                      layer.out_width(), layer.batch_norm});
  }
  return shapes;
}

RingCnn::RingCnn(const RingCnnConfig& config, std::mt19937_64& rng)
    : config_(config) {
  Require(!config.channels.empty(), ErrorCode::kConfig,
          "ring cnn: at least one stage is required");
  Require(config.kernel >= 1 && config.kernel % 2 == 1, ErrorCode::kConfig,
          "ring cnn: kernel size must be odd and positive");
  Require(config.height_bins >= 1 && config.num_classes >= 1, ErrorCode::kConfig,
          "ring cnn: height bins and class count must be positive");
  const int k = config.kernel;
  int in = config.in_channels;
  for (std::size_t s = 0; s < config.channels.size(); ++s) {
    const int stride = s == 0 ? 1 : 2;
    Block block{RingConv2d(in, config.channels[s], k, k, stride, stride,
                           config.circular),
                BatchNorm2d(config.channels[s])};
    block.conv.Initialize(rng);
    down_.push_back(std::move(block));
    in = config.channels[s];
  }
  for (std::size_t s = 0; s + 1 < config.channels.size(); ++s) {
    const int c = config.channels[s];
    Block block{RingConv2d(config.channels[s + 1] + c, c, k, k, 1, 1,
                           config.circular),
                BatchNorm2d(c)};
    block.conv.Initialize(rng);
    up_.push_back(std::move(block));
  }
  head_ = RingConv2d(config.channels[0], config.height_bins * config.num_classes,
                     1, 1, 1, 1, config.circular);
  head_.Initialize(rng);
}

int RingCnn::downsample_factor() const {
  return 1 << (static_cast<int>(down_.size()) - 1);
}

void RingCnn::set_circular(bool circular) {
  config_.circular = circular;
  for (auto& b : down_) b.conv.set_circular(circular);
  for (auto& b : up_) b.conv.set_circular(circular);
  head_.set_circular(circular);
}

VoxelPrediction RingCnn::Forward(const Tensor3& input, Mode mode, Cache* cache) {
  const int factor = downsample_factor();
  Require(input.rows % factor == 0 && input.cols % factor == 0,
          ErrorCode::kShapeMismatch,
          "ring cnn: grid " + std::to_string(input.rows) + "x" +
              std::to_string(input.cols) + " is not divisible by " +
              std::to_string(factor));
  const std::size_t stages = down_.size();
  if (cache) {
    cache->down.assign(stages, {});
    cache->up.assign(up_.size(), {});
    cache->valid = true;
  }

  std::vector<Tensor3> skips(stages);
  Tensor3 x = input;
  for (std::size_t s = 0; s < stages; ++s) {
    x = BlockForward(down_[s], x, mode, cache ? &cache->down[s] : nullptr);
    if (s + 1 < stages) skips[s] = x;
  }
  for (std::size_t s = up_.size(); s-- > 0;) {
    x = ConcatChannels(Upsample2x(x), skips[s]);
    x = BlockForward(up_[s], x, mode, cache ? &cache->up[s] : nullptr);
  }
  VoxelPrediction pred;
  pred.logits = head_.Forward(x, cache ? &cache->head : nullptr);
  pred.num_classes = config_.num_classes;
  pred.height_bins = config_.height_bins;
  return pred;
}

Tensor3 RingCnn::Backward(const Cache& cache, const Tensor3& grad_logits) {
  Require(cache.valid, ErrorCode::kState, "ring cnn: missing forward cache");
  Tensor3 grad = head_.Backward(cache.head, grad_logits);
  std::vector<Tensor3> skip_grads(down_.size());
  for (std::size_t s = 0; s < up_.size(); ++s) {
    grad = BlockBackward(up_[s], cache.up[s], std::move(grad));
    auto [upsampled, skip] = SplitChannels(grad, config_.channels[s + 1]);
    skip_grads[s] = std::move(skip);
    grad = Upsample2xBackward(upsampled);
  }
  for (std::size_t s = down_.size(); s-- > 0;) {
    if (s + 1 < down_.size()) AddInPlace(grad, skip_grads[s]);
    grad = BlockBackward(down_[s], cache.down[s], std::move(grad));
  }
  return grad;
}

void RingCnn::ZeroGrad() {
  for (auto& b : down_) {
    b.conv.ZeroGrad();
    b.bn.ZeroGrad();
  }
  for (auto& b : up_) {
    b.conv.ZeroGrad();
    b.bn.ZeroGrad();
  }
  head_.ZeroGrad();
}

std::vector<ParamView> RingCnn::Params(const std::string& prefix) {
  std::vector<ParamView> views;
  auto add_conv = [&](RingConv2d& conv, const std::string& name) {
    views.push_back({name + ".weight",
                     {conv.out_channels(), conv.in_channels(), conv.kernel_rows(),
                      conv.kernel_cols()},
                     conv.weight.data(), conv.grad_weight.data(),
                     static_cast<std::size_t>(conv.weight.size())});
    views.push_back({name + ".bias", {conv.out_channels()}, conv.bias.data(),
                     conv.grad_bias.data(),
                     static_cast<std::size_t>(conv.bias.size())});
  };
  auto add_block = [&](Block& b, const std::string& name) {
    add_conv(b.conv, name + ".conv");
    const int c = b.bn.channels();
    const auto n = static_cast<std::size_t>(c);
    views.push_back({name + ".bn.gamma", {c}, b.bn.gamma.data(),
                     b.bn.grad_gamma.data(), n});
    views.push_back({name + ".bn.beta", {c}, b.bn.beta.data(),
                     b.bn.grad_beta.data(), n});
    views.push_back({name + ".bn.running_mean", {c}, b.bn.running_mean.data(),
                     nullptr, n});
    views.push_back({name + ".bn.running_var", {c}, b.bn.running_var.data(),
                     nullptr, n});
  };
  for (std::size_t s = 0; s < down_.size(); ++s) {
    add_block(down_[s], prefix + "down" + std::to_string(s));
  }
  for (std::size_t s = 0; s < up_.size(); ++s) {
    add_block(up_[s], prefix + "up" + std::to_string(s));
  }
  add_conv(head_, prefix + "head");
  return views;
}

std::vector<ConvLayerShape> RingCnn::LayerShapes(int rows, int cols) const {
  std::vector<ConvLayerShape> shapes;
  std::vector<std::pair<int, int>> sizes;
  int r = rows, c = cols;
  auto shape_of = [](const RingConv2d& conv, const std::string& name, int out_r,
                     int out_c, bool bn) {
    return ConvLayerShape{name, conv.in_channels(), conv.out_channels(),
                          conv.kernel_rows(), conv.kernel_cols(), out_r, out_c,
                          true, bn};
  };
  for (std::size_t s = 0; s < down_.size(); ++s) {
    std::tie(r, c) = down_[s].conv.OutputSize(r, c);
    sizes.emplace_back(r, c);
    shapes.push_back(shape_of(down_[s].conv, "down" + std::to_string(s), r, c, true));
  }
  for (std::size_t s = up_.size(); s-- > 0;) {
    const auto [ur, uc] = sizes[s];
    shapes.push_back(shape_of(up_[s].conv, "up" + std::to_string(s), ur, uc, true));
  }
  shapes.push_back(shape_of(head_, "head", sizes[0].first, sizes[0].second, false));
  return shapes;
}

}  // namespace polargrid
