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

#include "hpqs/nqs.hpp"

#include "hpqs/error.hpp"
#include "hpqs/statevector.hpp"

#include <cmath>

namespace hpqs {

Activation parse_activation(const std::string& name) {
  if (name == "none") return Activation::None;
  if (name == "relu") return Activation::ReLU;
  if (name == "softplus") return Activation::Softplus;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw ConfigError("unknown activation '" + name + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::None: return "none";
    case Activation::ReLU: return "relu";
    case Activation::Softplus: return "softplus";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "?";
}

Tensor activate(Tape& tape, const Tensor& x, Activation a) {
  switch (a) {
    case Activation::ReLU: return ad::relu(tape, x);
    case Activation::Softplus: return ad::softplus(tape, x);
    case Activation::Sigmoid: return ad::sigmoid(tape, x);
    case Activation::None: break;
  }
  return x;
}

NqsNetwork::NqsNetwork(NqsLayout layout, Rng& init) : layout_(std::move(layout)) {
  if (layout_.input_width == 0 || layout_.output_width == 0)
    throw ShapeError("nqs: zero input or output width");
  std::vector<std::size_t> widths{layout_.input_width};
  widths.insert(widths.end(), layout_.hidden.begin(), layout_.hidden.end());
  widths.push_back(layout_.output_width);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t in = widths[l], out = widths[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Tensor w = Tensor::zeros({in, out}, true);
    Tensor b = Tensor::zeros({out}, true);
    for (Eigen::Index i = 0; i < w.data().size(); ++i) w.data()[i] = init.uniform(-bound, bound);
    for (Eigen::Index i = 0; i < b.data().size(); ++i) b.data()[i] = init.uniform(-bound, bound);
    weights_.push_back(w);
    biases_.push_back(b);
  }
}

NqsNetwork NqsNetwork::bitstring_default(std::size_t n_qubits, Rng& init, Activation head,
                                         std::size_t hidden_width) {
  return NqsNetwork(NqsLayout{n_qubits, {hidden_width}, Activation::ReLU, 1, head}, init);
}

NqsNetwork NqsNetwork::qml_classifier(Rng& init, std::size_t features) {
  return NqsNetwork(NqsLayout{features, {1}, Activation::ReLU, 2, Activation::None}, init);
}

Tensor NqsNetwork::forward(Tape& tape, const Tensor& inputs) const {
  if (inputs.rank() != 2 || inputs.dim(1) != layout_.input_width)
    throw ShapeError("nqs: expected inputs [B, " + std::to_string(layout_.input_width) +
                     "], got " + shape_string(inputs.shape()));
  Tensor h = inputs;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = ad::add(tape, ad::matmul(tape, h, weights_[l]), biases_[l]);
    const bool last = l + 1 == weights_.size();
    h = activate(tape, h, last ? layout_.head : layout_.hidden_activation);
  }
  return h;
}

std::vector<Tensor> NqsNetwork::parameters() const {
  std::vector<Tensor> out;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.push_back(weights_[l]);
    out.push_back(biases_[l]);
  }
  return out;
}

std::size_t NqsNetwork::param_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.numel();
  return n;
}

void NqsNetwork::zero_parameters() {
  for (auto& p : parameters()) {
    Tensor t = p;
    t.data().setZero();
  }
}

std::size_t dense_param_count(const NqsLayout& layout) {
  std::size_t n = 0, in = layout.input_width;
  for (std::size_t h : layout.hidden) {
    n += in * h + h;
    in = h;
  }
  return n + in * layout.output_width + layout.output_width;
}

Tensor basis_bits(int n_qubits, std::span<const std::size_t> indices) {
  const std::size_t n = static_cast<std::size_t>(n_qubits);
  Tensor bits = Tensor::zeros({indices.size(), n});
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= (std::size_t{1} << n_qubits))
      throw ShapeError("basis_bits: index " + std::to_string(indices[r]) + " outside " +
                       std::to_string(n_qubits) + "-qubit register");
    for (int q = 0; q < n_qubits; ++q)
      bits.data()[static_cast<Eigen::Index>(r * n + q)] = basis_bit(indices[r], q, n_qubits);
  }
  return bits;
}

Tensor nqs_forward(Tape& tape, const NqsNetwork& net, std::span<const int> bits) {
  if (bits.size() != net.layout().input_width)
    throw ShapeError("nqs_forward: bitstring of length " + std::to_string(bits.size()) +
                     " for input width " + std::to_string(net.layout().input_width));
  Tensor x = Tensor::zeros({1, bits.size()});
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] != 0 && bits[j] != 1)
      throw ShapeError("nqs_forward: bit " + std::to_string(j) + " is not 0 or 1");
    x.data()[static_cast<Eigen::Index>(j)] = bits[j];
  }
  return net.forward(tape, x);
}

Tensor normalize(Tape& tape, const Tensor& a) {
  const double total = a.data().sum();
  if (!(total >= 1e-30))
    throw NumericError("normalize: denominator " + std::to_string(total) + " below 1e-30");
  Tensor out = Tensor::from(a.shape(), Eigen::VectorXd(a.data() / total));
  require_finite("normalize", out);
  tape.record("normalize", {a}, out, [a, out, total]() mutable {
    if (!a.requires_grad()) return;
    const double dot = out.grad().dot(out.data());
    a.grad().array() += (out.grad().array() - dot) / total;
  });
  return out;
}

Tensor nqs_distribution(Tape& tape, const NqsNetwork& net, int n_qubits) {
  if (net.layout().input_width != static_cast<std::size_t>(n_qubits) ||
      net.layout().output_width != 1)
    throw ShapeError("nqs_distribution: network is not a scalar bitstring model for " +
                     std::to_string(n_qubits) + " qubits");
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw ShapeError("nqs_distribution: qubit count out of range");
  std::vector<std::size_t> all(std::size_t{1} << n_qubits);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  Tensor raw = net.forward(tape, basis_bits(n_qubits, all));
  Tensor positive = ad::softplus(tape, ad::reshape(tape, raw, {all.size()}));
  return normalize(tape, positive);
}

Tensor nqs_classifier_forward(Tape& tape, const NqsNetwork& net, const Tensor& features) {
  if (features.rank() != 2 || features.dim(1) != net.layout().input_width)
    throw ShapeError("nqs_classifier_forward: features " + shape_string(features.shape()) +
                     " do not match input width " + std::to_string(net.layout().input_width));
  return net.forward(tape, features);
}

}  // namespace hpqs
