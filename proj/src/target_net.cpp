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

#include "hpqs/target_net.hpp"

#include "hpqs/error.hpp"

#include <string>

namespace hpqs {

namespace {

std::size_t layer_params(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::Conv2d: return l.out * l.in * l.kernel * l.kernel + l.out;
    case LayerKind::Linear: return l.out * l.in + l.out;
    default: return 0;
  }
}

// Per-sample shape after each layer; throws on a broken chain.
Shape propagate(const Shape& in, const LayerSpec& l, std::size_t index) {
  const std::string where = "target layer " + std::to_string(index) + ": ";
  switch (l.kind) {
    case LayerKind::Conv2d:
      if (in.size() != 3 || in[0] != l.in || in[1] < l.kernel || in[2] < l.kernel || l.kernel == 0)
        throw ShapeError(where + "conv2d(" + std::to_string(l.in) + "->" + std::to_string(l.out) +
                         ", " + std::to_string(l.kernel) + ") cannot take " + shape_string(in));
      return {l.out, in[1] - l.kernel + 1, in[2] - l.kernel + 1};
    case LayerKind::AvgPool2d:
      if (in.size() != 3 || l.kernel == 0 || in[1] < l.kernel || in[2] < l.kernel)
        throw ShapeError(where + "avgpool2d cannot take " + shape_string(in));
      return {in[0], in[1] / l.kernel, in[2] / l.kernel};
    case LayerKind::ReLU: return in;
    case LayerKind::Flatten: return {shape_numel(in)};
    case LayerKind::Linear:
      if (in.size() != 1 || in[0] != l.in)
        throw ShapeError(where + "linear(" + std::to_string(l.in) + "->" + std::to_string(l.out) +
                         ") cannot take " + shape_string(in));
      return {l.out};
  }
  return in;
}

}  // namespace

std::size_t TargetSpec::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += layer_params(l);
  return n;
}

void TargetSpec::validate() const {
  Shape s = input_shape;
  for (std::size_t i = 0; i < layers.size(); ++i) s = propagate(s, layers[i], i);
}

TargetSpec TargetSpec::linear(std::size_t in, std::size_t out) {
  return TargetSpec{{in}, {{LayerKind::Linear, in, out, 0}}};
}

TargetSpec TargetSpec::qt_default() {
  return TargetSpec{{1, 28, 28},
                    {{LayerKind::Conv2d, 1, 8, 5},
                     {LayerKind::ReLU},
                     {LayerKind::AvgPool2d, 0, 0, 2},
                     {LayerKind::Conv2d, 8, 12, 5},
                     {LayerKind::ReLU},
                     {LayerKind::AvgPool2d, 0, 0, 2},
                     {LayerKind::Flatten},
                     {LayerKind::Linear, 192, 20, 0},
                     {LayerKind::ReLU},
                     {LayerKind::Linear, 20, 10, 0}}};
}

TargetSpec TargetSpec::qt_desk() {
  return TargetSpec{{1, 28, 28},
                    {{LayerKind::Conv2d, 1, 2, 5},
                     {LayerKind::ReLU},
                     {LayerKind::AvgPool2d, 0, 0, 2},
                     {LayerKind::Conv2d, 2, 4, 5},
                     {LayerKind::ReLU},
                     {LayerKind::AvgPool2d, 0, 0, 2},
                     {LayerKind::Flatten},
                     {LayerKind::Linear, 64, 10, 0}}};
}

TargetSpec TargetSpec::by_name(const std::string& name) {
  if (name == "default") return qt_default();
  if (name == "desk") return qt_desk();
  throw ConfigError("unknown target network '" + name + "' (expected default or desk)");
}

TargetNetwork instantiate_target(Tape& tape, const TargetSpec& spec, const Tensor& a) {
  spec.validate();
  if (a.rank() != 1) throw ShapeError("instantiate_target: weight vector must be 1-D, got " +
                                      shape_string(a.shape()));
  const std::size_t need = spec.param_count();
  if (a.numel() < need)
    throw ShapeError("instantiate_target: " + std::to_string(a.numel()) +
                     " generated values for a network with " + std::to_string(need) + " weights");
  TargetNetwork net;
  net.spec_ = spec;
  std::size_t offset = 0;
  for (const auto& l : spec.layers) {
    std::vector<Tensor> p;
    if (l.kind == LayerKind::Conv2d || l.kind == LayerKind::Linear) {
      const Shape w = l.kind == LayerKind::Conv2d ? Shape{l.out, l.in, l.kernel, l.kernel}
                                                  : Shape{l.out, l.in};
      p.push_back(ad::slice(tape, a, offset, w));
      offset += shape_numel(w);
      p.push_back(ad::slice(tape, a, offset, {l.out}));
      offset += l.out;
    }
    net.params_.push_back(std::move(p));
  }
  return net;
}

Tensor TargetNetwork::forward(Tape& tape, const Tensor& inputs) const {
  Shape expect{0};
  expect.insert(expect.end(), spec_.input_shape.begin(), spec_.input_shape.end());
  expect[0] = inputs.rank() > 0 ? inputs.dim(0) : 0;
  if (inputs.shape() != expect)
    throw ShapeError("target network: input " + shape_string(inputs.shape()) + ", expected [B, " +
                     shape_string(spec_.input_shape) + "]");
  Tensor x = inputs;
  const std::size_t batch = inputs.dim(0);
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const LayerSpec& l = spec_.layers[i];
    switch (l.kind) {
      case LayerKind::Conv2d: x = ad::conv2d(tape, x, params_[i][0], params_[i][1]); break;
      case LayerKind::AvgPool2d: x = ad::avgpool2d(tape, x, l.kernel); break;
      case LayerKind::ReLU: x = ad::relu(tape, x); break;
      case LayerKind::Flatten: x = ad::reshape(tape, x, {batch, x.numel() / batch}); break;
      case LayerKind::Linear:
        x = ad::add(tape, ad::matmul(tape, x, ad::transpose(tape, params_[i][0])), params_[i][1]);
        break;
    }
  }
  return x;
}

Eigen::VectorXd flatten_parameters(const TargetNetwork& net) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(net.spec().param_count()));
  Eigen::Index offset = 0;
  for (const auto& layer : net.parameters())
    for (const auto& t : layer) {
      out.segment(offset, t.data().size()) = t.data();
      offset += t.data().size();
    }
  return out;
}

}  // namespace hpqs
