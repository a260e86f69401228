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

#ifndef POLARGRID_TENSOR_HPP_
#define POLARGRID_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace polargrid {

// Row-major so that one point (or one output position) is one row.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Storage aligned like Eigen's own matrices. Vectorized reductions peel
// according to the buffer address, so a fixed alignment keeps results
// bit-identical from run to run.
using AlignedBuffer = std::vector<double, Eigen::aligned_allocator<double>>;

// Dense (channels, rows, cols) array; rows is the radial/zenith axis and
// cols the azimuthal axis.
struct Tensor3 {
  int channels = 0;
  int rows = 0;
  int cols = 0;
  AlignedBuffer data;

  Tensor3() = default;
  Tensor3(int c, int h, int w, double fill = 0.0)
      : channels(c), rows(h), cols(w),
        data(static_cast<std::size_t>(c) * h * w, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t plane_size() const { return static_cast<std::size_t>(rows) * cols; }
  double& at(int c, int h, int w) {
    return data[(static_cast<std::size_t>(c) * rows + h) * cols + w];
  }
  double at(int c, int h, int w) const {
    return data[(static_cast<std::size_t>(c) * rows + h) * cols + w];
  }
  bool SameShape(const Tensor3& o) const {
    return channels == o.channels && rows == o.rows && cols == o.cols;
  }
  // Channels x (rows * cols) view.
  Eigen::Map<Matrix> AsMatrix() {
    return {data.data(), channels, static_cast<Eigen::Index>(plane_size())};
  }
  Eigen::Map<const Matrix> AsMatrix() const {
    return {data.data(), channels, static_cast<Eigen::Index>(plane_size())};
  }
};

// Per-cell features on the 2D grid. Axis 2 (cols) wraps when circular.
struct FeatureGrid {
  Tensor3 values;
  bool circular = false;
  std::vector<std::uint8_t> occupancy;  // rows * cols
};

// A named parameter or buffer, exposed for optimizers and checkpoints.
// grad is null for non-trainable buffers such as running statistics.
struct ParamView {
  std::string name;
  std::vector<int> shape;
  double* value = nullptr;
  double* grad = nullptr;
  std::size_t size = 0;

  bool trainable() const { return grad != nullptr; }
};

enum class Mode { kTrain, kInference };

}  // namespace polargrid

#endif  // POLARGRID_TENSOR_HPP_
