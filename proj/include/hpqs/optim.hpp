// Copyright 2026 The HPQS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "hpqs/tensor.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace hpqs {

enum class OptimizerKind { SGD, Adam, AdamW };

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);

struct OptimizerOptions {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Decoupled decay for AdamW; ignored by SGD and Adam.
  double weight_decay = 0.0;
};

/// First-order optimizer over a fixed parameter list.
///
/// `step` updates every parameter that carries a gradient buffer and zeroes
/// it; parameters without one are skipped. Moments are allocated to match each
/// parameter on construction.
class Optimizer {
 public:
  Optimizer(OptimizerOptions options, std::vector<Tensor> params);

  void step();
  void zero_grad();

  std::size_t step_count() const { return step_count_; }
  const OptimizerOptions& options() const { return options_; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }
  const std::vector<Eigen::VectorXd>& first_moments() const { return m_; }
  const std::vector<Eigen::VectorXd>& second_moments() const { return v_; }

 private:
  OptimizerOptions options_;
  std::vector<Tensor> params_;
  std::vector<Eigen::VectorXd> m_;
  std::vector<Eigen::VectorXd> v_;
  std::size_t step_count_ = 0;
};

}  // namespace hpqs
