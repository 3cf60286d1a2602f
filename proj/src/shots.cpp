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

#include "hpqs/shots.hpp"

#include "hpqs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hpqs {

std::uint64_t ShotBudget::n_shot() const {
  if (!(multiplier > 0) || !std::isfinite(multiplier))
    throw ConfigError("shot budget: multiplier must be positive, got " + std::to_string(multiplier));
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw ConfigError("shot budget: qubit count " + std::to_string(n_qubits) + " out of range");
  const double shots = std::round(multiplier * std::ldexp(1.0, n_qubits));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(shots));
}

EmpiricalDistribution::EmpiricalDistribution(int n_qubits, std::vector<std::uint64_t> counts)
    : n_qubits_(n_qubits), counts_(std::move(counts)) {
  if (counts_.size() != (std::size_t{1} << n_qubits))
    throw ShapeError("empirical distribution: " + std::to_string(counts_.size()) +
                     " counts for " + std::to_string(n_qubits) + " qubits");
  n_shot_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  if (n_shot_ == 0) throw ShapeError("empirical distribution: zero shots");
}

Eigen::VectorXd EmpiricalDistribution::probabilities() const {
  Eigen::VectorXd p(static_cast<Eigen::Index>(counts_.size()));
  const double inv = 1.0 / static_cast<double>(n_shot_);
  for (std::size_t i = 0; i < counts_.size(); ++i)
    p[static_cast<Eigen::Index>(i)] = static_cast<double>(counts_[i]) * inv;
  return p;
}

void NoisePreset::validate() const {
  for (double p : {p1, p2, p_ro})
    if (!(p >= 0.0 && p <= 1.0))
      throw ConfigError("noise preset '" + name + "': probability " + std::to_string(p) +
                        " outside [0, 1]");
}

const std::map<std::string, NoisePreset>& builtin_noise_presets() {
  static const std::map<std::string, NoisePreset> presets = {
      {"ideal", NoisePreset{"ideal", 0.0, 0.0, 0.0}},
      {"noisy-a", NoisePreset{"noisy-a", 0.001, 0.01, 0.02}},
      {"noisy-b", NoisePreset{"noisy-b", 0.002, 0.02, 0.03}},
  };
  return presets;
}

EmpiricalDistribution sample_shots(const Eigen::VectorXd& probs, int n_qubits,
                                   std::uint64_t n_shot, Rng& rng, double p_readout) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (static_cast<std::size_t>(probs.size()) != dim)
    throw ShapeError("sample_shots: " + std::to_string(probs.size()) +
                     " probabilities for " + std::to_string(n_qubits) + " qubits");
  if (n_shot == 0) throw ShapeError("sample_shots: zero shots requested");
  std::vector<double> cdf(dim);
  double total = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    total += std::max(0.0, probs[static_cast<Eigen::Index>(i)]);
    cdf[i] = total;
  }
  if (!(total > 0.0)) throw NumericError("sample_shots: probabilities sum to zero");
  // The last non-empty bin absorbs u * total == cdf.back() rounding.
  std::size_t last = dim - 1;
  while (last > 0 && cdf[last] == cdf[last - 1]) --last;

  std::vector<std::uint64_t> counts(dim, 0);
  for (std::uint64_t s = 0; s < n_shot; ++s) {
    const double u = rng.uniform() * total;
    std::size_t idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    idx = std::min(idx, last);
    if (p_readout > 0.0)
      for (int q = 0; q < n_qubits; ++q)
        if (rng.uniform() < p_readout) idx ^= std::size_t{1} << (n_qubits - 1 - q);
    ++counts[idx];
  }
  return EmpiricalDistribution(n_qubits, std::move(counts));
}

EmpiricalDistribution sample_shots(const Statevector<double>& psi, const ShotBudget& budget,
                                   Rng& rng, double p_readout) {
  if (budget.n_qubits != psi.n_qubits())
    throw ShapeError("sample_shots: budget for " + std::to_string(budget.n_qubits) +
                     " qubits applied to a " + std::to_string(psi.n_qubits()) + "-qubit state");
  return sample_shots(exact_probabilities(psi), psi.n_qubits(), budget.n_shot(), rng, p_readout);
}

Trajectory apply_noise_trajectory(const Circuit& circuit, std::span<const double> params,
                                  const NoisePreset& preset, Rng& rng) {
  preset.validate();
  check_parameter_count(circuit, params);
  Trajectory out{Statevector<double>(circuit.n_qubits()), 0};
  for (const Gate& g : circuit.gates()) {
    apply_gate(out.state, g, params);
    if (g.kind == GateKind::CNOT) {
      if (preset.p2 > 0.0 && rng.uniform() < preset.p2) {
        const auto pair = 1 + rng.below(15);  // 1..15 over {I,X,Y,Z}^2 minus II
        out.state.pauli(g.control, static_cast<int>(pair / 4));
        out.state.pauli(g.target, static_cast<int>(pair % 4));
        ++out.insertions;
      }
    } else if (preset.p1 > 0.0 && rng.uniform() < preset.p1) {
      out.state.pauli(g.target, static_cast<int>(1 + rng.below(3)));
      ++out.insertions;
    }
  }
  return out;
}

double hoeffding_epsilon(int n_qubits, std::uint64_t n_shot, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("hoeffding_epsilon: delta must lie in (0, 1), got " +
                            std::to_string(delta));
  if (n_shot == 0) throw std::domain_error("hoeffding_epsilon: n_shot must be >= 1");
  if (n_qubits < 1) throw std::domain_error("hoeffding_epsilon: n_qubits must be >= 1");
  return std::sqrt(std::ldexp(1.0, n_qubits) * std::log(2.0 / delta) /
                   (2.0 * static_cast<double>(n_shot)));
}

double hoeffding_tail(double epsilon, double shots_per_state) {
  if (!(epsilon > 0.0)) return 1.0;
  return std::min(1.0, 2.0 * std::exp(-2.0 * epsilon * epsilon * shots_per_state));
}

}  // namespace hpqs
