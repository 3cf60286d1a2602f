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

#include "hpqs/circuit.hpp"
#include "hpqs/mps.hpp"
#include "hpqs/nqs.hpp"
#include "hpqs/shots.hpp"
#include "hpqs/tensor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hpqs {

// ------------------------------------------------------------ postprocessors

struct IdentityPost {};

/// y = scale * x + shift with scalar scale and shift.
struct AffinePost {
  Tensor scale;  // [1]
  Tensor shift;  // [1]
  static AffinePost make(double scale, double shift, bool trainable);
};

/// Input [B, n] -> per-group sums [B, G] -> optional per-group affine ->
/// softmax over groups.
struct GroupSoftmaxPost {
  std::vector<std::vector<int>> groups;
  Tensor scale;  // [G] or undefined
  Tensor shift;  // [G] or undefined
  static GroupSoftmaxPost make(std::vector<std::vector<int>> groups, bool affine);
};

/// MPS decoder over (basis bits..., branch value).
struct MpsPost {
  std::shared_ptr<MpsDecoder> decoder;
};

using Postprocessor = std::variant<IdentityPost, AffinePost, GroupSoftmaxPost, MpsPost>;

std::string postprocessor_kind(const Postprocessor& post);
Tensor apply_postprocessor(Tape& tape, const Postprocessor& post, const Tensor& input);
/// Trainable handles in a fixed order; empty for fixed postprocessors.
std::vector<Tensor> postprocessor_parameters(const Postprocessor& post);

// ------------------------------------------------------------ quantum branch

enum class ReadoutMode { Exact, Finite };
ReadoutMode parse_readout_mode(const std::string& name);
std::string to_string(ReadoutMode mode);

/// Identifies the random streams of one readout call. `stream` separates
/// training from evaluation draws; `step` is the optimizer step or
/// evaluation index.
struct ReadoutContext {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t step = 0;
};

/// Everything needed to push dL/dp back onto theta after a tape sweep.
struct ReadoutTrace {
  ReadoutContext ctx;
  std::vector<std::vector<double>> prefixes;
  Tensor probs;  // [rows, 2^n] leaf
};

/// Circuit with trainable angles theta and a probability readout.
///
/// The circuit's parameter vector is (prefix..., theta...): `prefix_width`
/// data-bound slots come first (encoder angles; zero for the parameter
/// generation ansatz), the remaining slots are trainable.
class QuantumBranch {
 public:
  QuantumBranch(Circuit circuit, std::size_t prefix_width, ReadoutMode mode,
                double shot_multiplier, NoisePreset noise, Rng& init,
                double init_range = 3.141592653589793);

  const Circuit& circuit() const { return circuit_; }
  int n_qubits() const { return circuit_.n_qubits(); }
  std::size_t prefix_width() const { return prefix_width_; }
  const Tensor& theta() const { return theta_; }
  ReadoutMode mode() const { return mode_; }
  const NoisePreset& noise() const { return noise_; }
  double shot_multiplier() const { return shot_multiplier_; }
  /// Shots per circuit evaluation in finite mode; 0 in exact mode.
  std::uint64_t n_shot() const;

  /// Probability estimates [rows, 2^n], one row per prefix. Exact mode
  /// returns |<i|psi>|^2; finite mode returns shot frequencies. The result is
  /// a leaf that requires a gradient iff theta does; call `backprop_theta`
  /// after the tape sweep to move its gradient onto theta.
  Tensor readout(const std::vector<std::vector<double>>& prefixes, const ReadoutContext& ctx,
                 ReadoutTrace* trace) const;

  /// theta.grad += sum_rows w . (p(theta + pi/2 e_j) - p(theta - pi/2 e_j)) / 2
  /// with w = dL/dp. Shifted evaluations use the forward readout pathway with
  /// fresh, independently keyed draws.
  void backprop_theta(const ReadoutTrace& trace) const;

  /// One probability row for the full parameter vector. Gate noise draws
  /// from `noise_rng`, shots and readout flips from `shot_rng`.
  Eigen::VectorXd evaluate(std::span<const double> params, Rng& noise_rng, Rng& shot_rng) const;

 private:
  Circuit circuit_;
  std::size_t prefix_width_;
  ReadoutMode mode_;
  double shot_multiplier_;
  NoisePreset noise_;
  Tensor theta_;
};

// ------------------------------------------------------------------ model

/// lambda * G(quantum) + (1 - lambda) * H(classical). Either branch may be
/// absent when lambda excludes it (lambda = 0 without quantum, lambda = 1
/// without classical).
struct HpqsModel {
  double lambda = 0.5;
  std::optional<QuantumBranch> quantum;
  std::optional<NqsNetwork> classical;
  Postprocessor g = IdentityPost{};
  Postprocessor h = IdentityPost{};

  /// Throws ConfigError on lambda outside [0, 1] or a missing branch that
  /// lambda requires.
  void validate() const;
};

/// (theta, gamma..., G parameters..., H parameters...).
std::vector<Tensor> registry_trainables(const HpqsModel& model);
std::size_t registry_count(const HpqsModel& model);

/// Basis-state wiring: for each basis index i, G sees (bits(i), p_i) and H
/// sees (bits(i), f_gamma(bits(i))). Output [rows, d_out].
Tensor hybrid_predict(Tape& tape, const HpqsModel& model, std::span<const std::size_t> indices,
                      const ReadoutContext& ctx, ReadoutTrace* trace);

/// Expectation wiring: the quantum branch encodes each feature row and
/// reports per-qubit <Z> ([B, n]) to G; the classical network maps the same
/// rows to logits for H. Output [B, classes].
Tensor hybrid_expectation_predict(Tape& tape, const HpqsModel& model, const Tensor& features,
                                  const ReadoutContext& ctx, ReadoutTrace* trace);

/// lambda * q + (1 - lambda) * c with shape checking.
Tensor blend(Tape& tape, double lambda, const Tensor& q, const Tensor& c);

/// Completes a training step's gradient: moves dL/dp onto theta when the
/// model has a quantum branch (no-op otherwise).
void finish_backward(const HpqsModel& model, const ReadoutTrace& trace);

}  // namespace hpqs
