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

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <vector>

namespace hpqs {

/// Scalar objective over a list of parameter tensors, rebuilt on a fresh tape.
using Objective = std::function<Tensor(Tape&, const std::vector<Tensor>&)>;

/// ||a - b|| / max(||a||, ||b||), or 0 when both vanish.
inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale < 1e-14 ? 0.0 : (a - b).norm() / scale;
}

/// Largest relative error between reverse-mode gradients and central
/// differences of step `h`, taken per parameter tensor.
inline double max_gradient_error(const Objective& f, const std::vector<Tensor>& params,
                                 double h = 1e-5) {
  for (const auto& p : params) p.clear_grad();
  {
    Tape tape;
    Tensor loss = f(tape, params);
    tape.backward(loss);
  }
  double worst = 0.0;
  for (const auto& p : params) {
    Eigen::VectorXd analytic =
        p.has_grad() ? Eigen::VectorXd(p.grad()) : Eigen::VectorXd::Zero(p.data().size());
    Eigen::VectorXd numeric(p.data().size());
    for (Eigen::Index i = 0; i < p.data().size(); ++i) {
      const double orig = p.data()[i];
      p.data()[i] = orig + h;
      Tape t1;
      const double up = f(t1, params).item();
      p.data()[i] = orig - h;
      Tape t2;
      const double down = f(t2, params).item();
      p.data()[i] = orig;
      numeric[i] = (up - down) / (2 * h);
    }
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  return worst;
}

/// Uniform random tensor in [lo, hi) with requires_grad set.
template <typename Rng>
Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  for (Eigen::Index i = 0; i < t.data().size(); ++i) t.data()[i] = rng.uniform(lo, hi);
  return t;
}

}  // namespace hpqs
