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
#include "hpqs/rng.hpp"
#include "hpqs/statevector.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hpqs {

/// Total shots per circuit evaluation, expressed as a multiple of 2^n.
struct ShotBudget {
  double multiplier;
  int n_qubits;

  /// round(multiplier * 2^n), at least 1.
  std::uint64_t n_shot() const;
};

/// Shot counts over the 2^n basis states.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution(int n_qubits, std::vector<std::uint64_t> counts);

  int n_qubits() const { return n_qubits_; }
  std::uint64_t n_shot() const { return n_shot_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  /// count_i / n_shot.
  Eigen::VectorXd probabilities() const;

 private:
  int n_qubits_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_shot_;
};

/// Depolarizing-plus-readout noise stand-in.
struct NoisePreset {
  std::string name = "ideal";
  double p1 = 0.0;    // per single-qubit gate
  double p2 = 0.0;    // per CNOT
  double p_ro = 0.0;  // per qubit, per shot

  bool is_ideal() const { return p1 == 0.0 && p2 == 0.0 && p_ro == 0.0; }
  /// Throws ConfigError unless every probability lies in [0, 1].
  void validate() const;
};

/// Built-in presets: "ideal", "noisy-a", "noisy-b".
const std::map<std::string, NoisePreset>& builtin_noise_presets();

/// Multinomial draw of `n_shot` outcomes from `probs`. Each shot is an
/// inverse-CDF draw; with `p_readout` > 0 every measured bit is then flipped
/// independently with that probability.
EmpiricalDistribution sample_shots(const Eigen::VectorXd& probs, int n_qubits,
                                   std::uint64_t n_shot, Rng& rng, double p_readout = 0.0);

EmpiricalDistribution sample_shots(const Statevector<double>& psi, const ShotBudget& budget,
                                   Rng& rng, double p_readout = 0.0);

struct Trajectory {
  Statevector<double> state;
  std::size_t insertions = 0;
};

/// One Monte-Carlo trajectory of `circuit` under the preset's gate noise:
/// after each rotation, with probability p1 a uniformly random non-identity
/// Pauli hits its target; after each CNOT, with probability p2 a uniformly
/// random non-identity two-qubit Pauli hits (control, target). Readout noise
/// is applied at sampling time, not here.
Trajectory apply_noise_trajectory(const Circuit& circuit, std::span<const double> params,
                                  const NoisePreset& preset, Rng& rng);

/// sqrt(2^n ln(2/delta) / (2 n_shot)).
double hoeffding_epsilon(int n_qubits, std::uint64_t n_shot, double delta);

/// min(1, 2 exp(-2 eps^2 n')), with n' the per-state shot count.
double hoeffding_tail(double epsilon, double shots_per_state);

}  // namespace hpqs
