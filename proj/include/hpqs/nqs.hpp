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

#include "hpqs/rng.hpp"
#include "hpqs/tensor.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hpqs {

enum class Activation { None, ReLU, Softplus, Sigmoid };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);
Tensor activate(Tape& tape, const Tensor& x, Activation a);

/// Fully connected layout: input -> hidden... -> output.
struct NqsLayout {
  std::size_t input_width = 1;
  std::vector<std::size_t> hidden;
  Activation hidden_activation = Activation::ReLU;
  std::size_t output_width = 1;
  /// Applied to the final layer; None keeps raw values.
  Activation head = Activation::None;
};

/// Classical estimator f_gamma. In bitstring mode the input is the 0/1
/// encoding of a basis state; in data mode it is a feature vector.
class NqsNetwork {
 public:
  /// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  NqsNetwork(NqsLayout layout, Rng& init);

  /// n -> 32 (ReLU) -> 1 over basis bitstrings.
  static NqsNetwork bitstring_default(std::size_t n_qubits, Rng& init,
                                      Activation head = Activation::None,
                                      std::size_t hidden_width = 32);
  /// 16 -> 1 (ReLU) -> 2 logits.
  static NqsNetwork qml_classifier(Rng& init, std::size_t features = 16);

  /// [B, input_width] -> [B, output_width].
  Tensor forward(Tape& tape, const Tensor& inputs) const;

  const NqsLayout& layout() const { return layout_; }
  /// (W0, b0, W1, b1, ...); weights stored [in, out].
  std::vector<Tensor> parameters() const;
  std::size_t param_count() const;
  void zero_parameters();

 private:
  NqsLayout layout_;
  std::vector<Tensor> weights_;
  std::vector<Tensor> biases_;
};

/// Closed-form parameter count of a dense layout.
std::size_t dense_param_count(const NqsLayout& layout);

/// [B, n] matrix of basis bits (qubit 0 = most significant) for each index.
Tensor basis_bits(int n_qubits, std::span<const std::size_t> indices);

/// f_gamma(phi) for one bitstring given as 0/1 values.
Tensor nqs_forward(Tape& tape, const NqsNetwork& net, std::span<const int> bits);

/// Softplus of the raw scalar output over all 2^n basis states, normalised
/// to sum to one. Throws NumericError if the normaliser falls below 1e-30.
Tensor nqs_distribution(Tape& tape, const NqsNetwork& net, int n_qubits);

/// a / sum(a); NumericError if the sum is below 1e-30.
Tensor normalize(Tape& tape, const Tensor& a);

/// Logits of the data-mode classifier; throws ShapeError on width mismatch.
Tensor nqs_classifier_forward(Tape& tape, const NqsNetwork& net, const Tensor& features);

}  // namespace hpqs
