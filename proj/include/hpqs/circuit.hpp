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

#include "hpqs/statevector.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hpqs {

enum class GateKind { RX, RY, RZ, CNOT };

struct Gate {
  GateKind kind;
  int target;
  int control = -1;  // CNOT only
  int slot = -1;     // rotations only
};

/// Ordered gate list over a fixed register. Every rotation owns one
/// parameter slot, numbered in insertion order.
class Circuit {
 public:
  explicit Circuit(int n_qubits);

  /// Appends a rotation and returns its parameter slot.
  int add_rotation(GateKind kind, int qubit);
  void add_cnot(int control, int target);

  int n_qubits() const { return n_qubits_; }
  std::size_t n_slots() const { return n_slots_; }
  const std::vector<Gate>& gates() const { return gates_; }

 private:
  int n_qubits_;
  std::size_t n_slots_ = 0;
  std::vector<Gate> gates_;
};

/// Layered hardware-efficient ansatz: per layer RY on every qubit followed by
/// a CNOT chain (q, q+1). n_qubits * layers parameters, one per rotation.
Circuit build_qt_ansatz(int n_qubits, int layers);

inline constexpr std::size_t kQmlFeatures = 16;
inline constexpr int kQmlQubits = 4;

/// Angle-encoding classifier circuit on four qubits.
///
/// Slots 0..15 take the input features in order through RY, RZ, RX and RY
/// layers (four features per layer, qubits 0..3). The trainable block
/// follows: per layer RY and RZ on every qubit, then a CNOT chain. With the
/// default five layers that is 40 trainable slots.
Circuit build_qml_circuit(int trainable_layers = 5);

/// Parameter vector for `build_qml_circuit`: features then theta.
/// Throws ShapeError unless there are exactly 16 features.
std::vector<double> bind_qml_parameters(std::span<const double> features,
                                        std::span<const double> theta);

template <typename Scalar = double>
Statevector<Scalar> simulate(const Circuit& circuit, std::span<const double> params);

/// Applies a single gate with the given parameter vector.
template <typename Scalar>
void apply_gate(Statevector<Scalar>& psi, const Gate& gate, std::span<const double> params);

Eigen::VectorXd exact_probabilities(const Statevector<double>& psi);

/// Diagonal observable in the computational basis: a sum of Pauli-Z terms
/// over `support`, stored as its eigenvalue table.
class Observable {
 public:
  /// Sum of Z_q over the listed qubits.
  static Observable z_sum(int n_qubits, std::vector<int> support);
  static Observable z(int n_qubits, int qubit) { return z_sum(n_qubits, {qubit}); }

  int n_qubits() const { return n_qubits_; }
  const std::vector<int>& support() const { return support_; }
  /// Eigenvalue per basis index, length 2^n.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

 private:
  int n_qubits_ = 0;
  std::vector<int> support_;
  Eigen::VectorXd eigenvalues_;
};

double exact_expectation(const Statevector<double>& psi, const Observable& obs);
/// Same contraction applied to any probability vector (exact or empirical).
double expectation_from_probabilities(const Eigen::VectorXd& probs, const Observable& obs);

/// Per-qubit <Z_q> table as a (2^n x n) matrix: entry (i, q) = +1 if qubit q
/// is 0 in basis state i, else -1. probs^T * table gives all <Z_q>.
Eigen::MatrixXd z_table(int n_qubits);

/// Identifies one evaluation inside a parameter-shift sweep: `slot` is the
/// shifted slot and `sign` is +1 or -1.
struct ShiftKey {
  std::size_t slot;
  int sign;
};

/// f(params, key) -> scalar readout. Stochastic readouts derive their random
/// stream from the key so that every shifted evaluation draws fresh samples.
using ShiftedReadout = std::function<double(std::span<const double>, const ShiftKey&)>;

/// grad_j = [f(params + pi/2 e_j) - f(params - pi/2 e_j)] / 2 for each slot j
/// in `slots`. Exact for readouts that are expectations of states produced
/// by RX/RY/RZ-parameterised circuits.
Eigen::VectorXd parameter_shift(std::span<const double> params,
                                std::span<const std::size_t> slots,
                                const ShiftedReadout& readout);

/// Parameter-shift gradient over all slots of `circuit` for a readout of the
/// simulated state.
Eigen::VectorXd parameter_shift_grad(
    const Circuit& circuit, std::span<const double> params,
    const std::function<double(const Statevector<double>&)>& readout);

// ------------------------------------------------------------ templates

template <typename Scalar>
void apply_gate(Statevector<Scalar>& psi, const Gate& gate, std::span<const double> params) {
  switch (gate.kind) {
    case GateKind::RX: psi.rx(gate.target, static_cast<Scalar>(params[gate.slot])); break;
    case GateKind::RY: psi.ry(gate.target, static_cast<Scalar>(params[gate.slot])); break;
    case GateKind::RZ: psi.rz(gate.target, static_cast<Scalar>(params[gate.slot])); break;
    case GateKind::CNOT: psi.cnot(gate.control, gate.target); break;
  }
}

void check_parameter_count(const Circuit& circuit, std::span<const double> params);

template <typename Scalar>
Statevector<Scalar> simulate(const Circuit& circuit, std::span<const double> params) {
  check_parameter_count(circuit, params);
  Statevector<Scalar> psi(circuit.n_qubits());
  for (const Gate& g : circuit.gates()) apply_gate(psi, g, params);
  return psi;
}

}  // namespace hpqs
