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

#include "hpqs/circuit.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hpqs {

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw ShapeError("circuit: qubit count " + std::to_string(n_qubits) + " outside [1, " +
                     std::to_string(kMaxQubits) + "]");
}

int Circuit::add_rotation(GateKind kind, int qubit) {
  if (kind == GateKind::CNOT) throw ShapeError("circuit: CNOT is not a rotation");
  if (qubit < 0 || qubit >= n_qubits_)
    throw ShapeError("circuit: qubit " + std::to_string(qubit) + " outside register of " +
                     std::to_string(n_qubits_));
  const int slot = static_cast<int>(n_slots_++);
  gates_.push_back(Gate{kind, qubit, -1, slot});
  return slot;
}

void Circuit::add_cnot(int control, int target) {
  if (control < 0 || control >= n_qubits_ || target < 0 || target >= n_qubits_)
    throw ShapeError("circuit: CNOT(" + std::to_string(control) + ", " + std::to_string(target) +
                     ") outside register of " + std::to_string(n_qubits_));
  if (control == target)
    throw ShapeError("circuit: CNOT control equals target (" + std::to_string(control) + ")");
  gates_.push_back(Gate{GateKind::CNOT, target, control, -1});
}

Circuit build_qt_ansatz(int n_qubits, int layers) {
  if (layers < 1) throw ShapeError("ansatz: layer count must be >= 1");
  Circuit c(n_qubits);
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n_qubits; ++q) c.add_rotation(GateKind::RY, q);
    for (int q = 0; q + 1 < n_qubits; ++q) c.add_cnot(q, q + 1);
  }
  return c;
}

Circuit build_qml_circuit(int trainable_layers) {
  if (trainable_layers < 0) throw ShapeError("qml circuit: negative layer count");
  Circuit c(kQmlQubits);
  for (GateKind kind : {GateKind::RY, GateKind::RZ, GateKind::RX, GateKind::RY})
    for (int q = 0; q < kQmlQubits; ++q) c.add_rotation(kind, q);
  for (int l = 0; l < trainable_layers; ++l) {
    for (int q = 0; q < kQmlQubits; ++q) c.add_rotation(GateKind::RY, q);
    for (int q = 0; q < kQmlQubits; ++q) c.add_rotation(GateKind::RZ, q);
    for (int q = 0; q + 1 < kQmlQubits; ++q) c.add_cnot(q, q + 1);
  }
  return c;
}

std::vector<double> bind_qml_parameters(std::span<const double> features,
                                        std::span<const double> theta) {
  if (features.size() != kQmlFeatures)
    throw ShapeError("qml encoder: expected " + std::to_string(kQmlFeatures) +
                     " features, got " + std::to_string(features.size()));
  std::vector<double> params(features.begin(), features.end());
  params.insert(params.end(), theta.begin(), theta.end());
  return params;
}

void check_parameter_count(const Circuit& circuit, std::span<const double> params) {
  if (params.size() != circuit.n_slots())
    throw ShapeError("simulate: circuit has " + std::to_string(circuit.n_slots()) +
                     " parameter slots, got " + std::to_string(params.size()) + " values");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (!std::isfinite(params[i]))
      throw NumericError("simulate: parameter " + std::to_string(i) + " is not finite");
}

Eigen::VectorXd exact_probabilities(const Statevector<double>& psi) {
  return psi.probabilities();
}

Observable Observable::z_sum(int n_qubits, std::vector<int> support) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw ShapeError("observable: qubit count " + std::to_string(n_qubits) + " out of range");
  Observable obs;
  obs.n_qubits_ = n_qubits;
  const std::size_t dim = std::size_t{1} << n_qubits;
  obs.eigenvalues_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (int q : support) {
    if (q < 0 || q >= n_qubits)
      throw ShapeError("observable: qubit " + std::to_string(q) + " outside register of " +
                       std::to_string(n_qubits));
    for (std::size_t i = 0; i < dim; ++i)
      obs.eigenvalues_[static_cast<Eigen::Index>(i)] += basis_bit(i, q, n_qubits) ? -1.0 : 1.0;
  }
  obs.support_ = std::move(support);
  return obs;
}

double expectation_from_probabilities(const Eigen::VectorXd& probs, const Observable& obs) {
  if (probs.size() != obs.eigenvalues().size())
    throw ShapeError("expectation: " + std::to_string(probs.size()) +
                     " probabilities for an observable on " + std::to_string(obs.n_qubits()) +
                     " qubits");
  return probs.dot(obs.eigenvalues());
}

double exact_expectation(const Statevector<double>& psi, const Observable& obs) {
  return expectation_from_probabilities(exact_probabilities(psi), obs);
}

Eigen::MatrixXd z_table(int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  Eigen::MatrixXd table(static_cast<Eigen::Index>(dim), n_qubits);
  for (std::size_t i = 0; i < dim; ++i)
    for (int q = 0; q < n_qubits; ++q)
      table(static_cast<Eigen::Index>(i), q) = basis_bit(i, q, n_qubits) ? -1.0 : 1.0;
  return table;
}

Eigen::VectorXd parameter_shift(std::span<const double> params,
                                std::span<const std::size_t> slots,
                                const ShiftedReadout& readout) {
  constexpr double kShift = std::numbers::pi / 2;
  Eigen::VectorXd grad(static_cast<Eigen::Index>(slots.size()));
  std::vector<double> shifted(params.begin(), params.end());
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const std::size_t j = slots[k];
    if (j >= params.size())
      throw ShapeError("parameter shift: slot " + std::to_string(j) + " outside " +
                       std::to_string(params.size()) + " parameters");
    const double original = shifted[j];
    shifted[j] = original + kShift;
    const double plus = readout(shifted, ShiftKey{j, +1});
    shifted[j] = original - kShift;
    const double minus = readout(shifted, ShiftKey{j, -1});
    shifted[j] = original;
    grad[static_cast<Eigen::Index>(k)] = 0.5 * (plus - minus);
  }
  return grad;
}

Eigen::VectorXd parameter_shift_grad(
    const Circuit& circuit, std::span<const double> params,
    const std::function<double(const Statevector<double>&)>& readout) {
  check_parameter_count(circuit, params);
  std::vector<std::size_t> slots(circuit.n_slots());
  for (std::size_t j = 0; j < slots.size(); ++j) slots[j] = j;
  return parameter_shift(params, slots, [&](std::span<const double> p, const ShiftKey&) {
    return readout(simulate<double>(circuit, p));
  });
}

}  // namespace hpqs
