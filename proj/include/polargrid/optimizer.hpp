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

#ifndef POLARGRID_OPTIMIZER_HPP_
#define POLARGRID_OPTIMIZER_HPP_

#include <cstddef>
#include <vector>

#include "polargrid/tensor.hpp"

namespace polargrid {

// Heavy-ball SGD: v = momentum * v + (g + weight_decay * w); w -= lr * v.
// Buffers are keyed by position in the parameter list, so the same list
// order must be passed on every step.
class SgdOptimizer {
 public:
  SgdOptimizer() = default;
  SgdOptimizer(double learning_rate, double momentum, double weight_decay)
      : learning_rate_(learning_rate),
        momentum_(momentum),
        weight_decay_(weight_decay) {}

  void Step(const std::vector<ParamView>& params) {
    if (velocity_.size() != params.size()) {
      velocity_.assign(params.size(), {});
    }
    for (std::size_t p = 0; p < params.size(); ++p) {
      const ParamView& view = params[p];
      if (!view.trainable()) continue;
      auto& v = velocity_[p];
      if (v.size() != view.size) v.assign(view.size, 0.0);
      for (std::size_t n = 0; n < view.size; ++n) {
        const double g = view.grad[n] + weight_decay_ * view.value[n];
        v[n] = momentum_ * v[n] + g;
        view.value[n] -= learning_rate_ * v[n];
      }
    }
  }

  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double lr) { learning_rate_ = lr; }

 private:
  double learning_rate_ = 0.01;
  double momentum_ = 0.9;
  double weight_decay_ = 0.0;
  std::vector<std::vector<double>> velocity_;
};

}  // namespace polargrid

#endif  // POLARGRID_OPTIMIZER_HPP_
