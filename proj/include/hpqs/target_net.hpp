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

#include <cstddef>
#include <string>
#include <vector>

namespace hpqs {

enum class LayerKind { Conv2d, AvgPool2d, ReLU, Flatten, Linear };

struct LayerSpec {
  LayerKind kind;
  std::size_t in = 0;      // conv: input channels; linear: input width
  std::size_t out = 0;     // conv: output channels; linear: output width
  std::size_t kernel = 0;  // conv and pool
};

/// Layer list of a classical network whose weights are generated rather than
/// trained directly. Weights fill in declared layer order; within a layer
/// the weight comes first (conv [O, C, k, k], linear [out, in], row-major),
/// then the bias.
struct TargetSpec {
  Shape input_shape;  // per-sample [C, H, W] or [F]
  std::vector<LayerSpec> layers;

  std::size_t param_count() const;
  /// Throws ShapeError if the layer chain does not compose.
  void validate() const;

  static TargetSpec linear(std::size_t in, std::size_t out);
  /// 6690-parameter MNIST CNN: conv(1->8, 5) relu pool2 conv(8->12, 5) relu
  /// pool2 flatten fc(192->20) relu fc(20->10).
  static TargetSpec qt_default();
  /// 906-parameter MNIST CNN: conv(1->2, 5) relu pool2 conv(2->4, 5) relu
  /// pool2 flatten fc(64->10).
  static TargetSpec qt_desk();
  static TargetSpec by_name(const std::string& name);
};

/// Weights sliced out of a generated vector; differentiable w.r.t. it.
class TargetNetwork {
 public:
  const TargetSpec& spec() const { return spec_; }
  /// Per layer: (weight, bias) for conv/linear, empty for the rest.
  const std::vector<std::vector<Tensor>>& parameters() const { return params_; }
  /// [B, input_shape...] -> output of the last layer.
  Tensor forward(Tape& tape, const Tensor& inputs) const;

 private:
  friend TargetNetwork instantiate_target(Tape& tape, const TargetSpec& spec, const Tensor& a);
  TargetSpec spec_;
  std::vector<std::vector<Tensor>> params_;
};

/// Fills the network from the first spec.param_count() entries of `a`
/// (1-D). Throws ShapeError when `a` is too short.
TargetNetwork instantiate_target(Tape& tape, const TargetSpec& spec, const Tensor& a);

/// Concatenated weights in fill order; the inverse of instantiate_target.
Eigen::VectorXd flatten_parameters(const TargetNetwork& net);

}  // namespace hpqs
