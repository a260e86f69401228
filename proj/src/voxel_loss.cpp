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

#include "polargrid/voxel_loss.hpp"

#include <cmath>
#include <limits>

#include "polargrid/error.hpp"
#include "polargrid/partition_stats.hpp"

namespace polargrid {

void CheckPredictionShape(const VoxelPrediction& pred, const VoxelizedScan& vox) {
  const GridSpec& spec = vox.spec;
  Require(pred.logits.rows == spec.rows() && pred.logits.cols == spec.cols() &&
              pred.height_bins == spec.heights() &&
              pred.logits.channels == pred.num_classes * pred.height_bins,
          ErrorCode::kShapeMismatch,
          "prediction shape does not match the voxelization grid");
}

VoxelLossResult VoxelLoss(const VoxelPrediction& pred, const VoxelizedScan& vox,
                          std::span<const ClassId> labels,
                          std::optional<ClassId> ignore,
                          std::span<const double> class_weights) {
  CheckPredictionShape(pred, vox);
  const int C = pred.num_classes;
  Require(class_weights.empty() || class_weights.size() == static_cast<std::size_t>(C),
          ErrorCode::kShapeMismatch, "voxel loss: one weight per class required");
  const auto targets = VoxelMajority(vox, labels, ignore);

  VoxelLossResult result;
  result.grad = Tensor3(pred.logits.channels, pred.logits.rows, pred.logits.cols);
  const std::size_t stride = pred.voxels();
  std::vector<double> prob(C);
  double weight_sum = 0.0;
  double loss_sum = 0.0;

  for (std::size_t g = 0; g < vox.voxels.size(); ++g) {
    const int t = targets[g];
    if (t < 0 || (ignore && t == *ignore)) continue;
    Require(t < C, ErrorCode::kInvalidArgument,
            "voxel loss: label " + std::to_string(t) + " >= class count");
    const std::size_t key = static_cast<std::size_t>(vox.voxels.keys[g]);
    const double w = class_weights.empty() ? 1.0 : class_weights[t];

    double max_logit = -std::numeric_limits<double>::infinity();
    int argmax = 0;
    for (int c = 0; c < C; ++c) {
      const double v = pred.logits.data[c * stride + key];
      if (v > max_logit) {
        max_logit = v;
        argmax = c;
      }
    }
    double denom = 0.0;
    for (int c = 0; c < C; ++c) {
      prob[c] = std::exp(pred.logits.data[c * stride + key] - max_logit);
      denom += prob[c];
    }
    const double log_denom = std::log(denom);
    loss_sum += w * (log_denom - (pred.logits.data[t * stride + key] - max_logit));
    for (int c = 0; c < C; ++c) {
      result.grad.data[c * stride + key] = w * (prob[c] / denom - (c == t ? 1.0 : 0.0));
    }
    weight_sum += w;
    ++result.counted_voxels;
    if (argmax == t) ++result.correct_voxels;
  }
  Require(result.counted_voxels > 0 && weight_sum > 0.0,
          ErrorCode::kInvalidArgument, "voxel loss: no labeled occupied voxels");
  result.loss = loss_sum / weight_sum;
  for (double& v : result.grad.data) v /= weight_sum;
  return result;
}

std::vector<ClassId> DecodeToPoints(const VoxelPrediction& pred,
                                    const VoxelizedScan& vox,
                                    std::optional<ClassId> exclude) {
  CheckPredictionShape(pred, vox);
  const std::size_t stride = pred.voxels();
  std::vector<ClassId> out(vox.num_points());
  for (std::size_t g = 0; g < vox.voxels.size(); ++g) {
    const std::size_t key = static_cast<std::size_t>(vox.voxels.keys[g]);
    int best = -1;
    double best_value = 0.0;
    for (int c = 0; c < pred.num_classes; ++c) {
      if (exclude && c == *exclude) continue;
      const double v = pred.logits.data[c * stride + key];
      if (best < 0 || v > best_value) {
        best = c;
        best_value = v;
      }
    }
    Require(best >= 0, ErrorCode::kInvalidArgument,
            "decode: no class left to predict");
    for (std::int32_t p : vox.voxels.members(g)) out[p] = static_cast<ClassId>(best);
  }
  return out;
}

}  // namespace polargrid
