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

#include "hpqs/optim.hpp"

#include "hpqs/error.hpp"

#include <cmath>

namespace hpqs {

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "sgd") return OptimizerKind::SGD;
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "adamw") return OptimizerKind::AdamW;
  throw ConfigError("unknown optimizer '" + name + "' (expected sgd, adam or adamw)");
}

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::SGD: return "sgd";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::AdamW: return "adamw";
  }
  return "?";
}

Optimizer::Optimizer(OptimizerOptions options, std::vector<Tensor> params)
    : options_(options), params_(std::move(params)) {
  for (const auto& p : params_) {
    m_.push_back(Eigen::VectorXd::Zero(p.data().size()));
    v_.push_back(Eigen::VectorXd::Zero(p.data().size()));
  }
}

void Optimizer::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void Optimizer::step() {
  ++step_count_;
  const double lr = options_.learning_rate;
  const double t = static_cast<double>(step_count_);
  const double bc1 = 1.0 - std::pow(options_.beta1, t);
  const double bc2 = 1.0 - std::pow(options_.beta2, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    // Parameters outside the loss graph (e.g. a branch silenced by lambda)
    // are left untouched, moments included.
    if (!params_[i].has_grad()) continue;
    Eigen::VectorXd& w = params_[i].data();
    const Eigen::VectorXd& g = params_[i].grad();
    if (options_.kind == OptimizerKind::SGD) {
      w -= lr * g;
    } else {
      if (options_.kind == OptimizerKind::AdamW && options_.weight_decay != 0.0)
        w *= 1.0 - lr * options_.weight_decay;
      m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * g;
      v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * g.cwiseAbs2();
      const Eigen::ArrayXd m_hat = m_[i].array() / bc1;
      const Eigen::ArrayXd v_hat = v_[i].array() / bc2;
      w.array() -= lr * m_hat / (v_hat.sqrt() + options_.epsilon);
    }
    if (!w.allFinite())
      throw NumericError("optimizer: parameter " + std::to_string(i) + " became non-finite");
    params_[i].zero_grad();
  }
}

}  // namespace hpqs
