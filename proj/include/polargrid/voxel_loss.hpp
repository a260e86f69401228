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

#ifndef POLARGRID_VOXEL_LOSS_HPP_
#define POLARGRID_VOXEL_LOSS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polargrid/grid.hpp"
#include "polargrid/ring_cnn.hpp"
#include "polargrid/scan_io.hpp"

namespace polargrid {

struct VoxelLossResult {
  double loss = 0.0;
  Tensor3 grad;                    // dL/d(logits), same layout as the logits
  std::int64_t counted_voxels = 0;
  std::int64_t correct_voxels = 0; // argmax == target among counted voxels

  double voxel_accuracy() const {
    return counted_voxels == 0
               ? 0.0
               : static_cast<double>(correct_voxels) / counted_voxels;
  }
};

// Mean softmax cross-entropy over occupied voxels whose majority label
// (ignore points excluded, ties to the smallest id) is not the ignore class.
// With class_weights the mean is weighted by the target class weight.
VoxelLossResult VoxelLoss(const VoxelPrediction& pred, const VoxelizedScan& vox,
                          std::span<const ClassId> labels,
                          std::optional<ClassId> ignore,
                          std::span<const double> class_weights = {});

// argmax over classes of each point's voxel; ties to the smallest id.
// A class listed in exclude is never predicted.
std::vector<ClassId> DecodeToPoints(const VoxelPrediction& pred,
                                    const VoxelizedScan& vox,
                                    std::optional<ClassId> exclude = std::nullopt);

void CheckPredictionShape(const VoxelPrediction& pred, const VoxelizedScan& vox);

}  // namespace polargrid

#endif  // POLARGRID_VOXEL_LOSS_HPP_
