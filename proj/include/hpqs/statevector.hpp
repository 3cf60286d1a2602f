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

#include "hpqs/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>

namespace hpqs {

inline constexpr int kMaxQubits = 16;

/// Dense n-qubit state. Basis index i stores qubit 0 in its most significant
/// bit, i.e. qubit q is bit (n - 1 - q) of i.
template <typename Scalar = double>
class Statevector {
 public:
  using Complex = std::complex<Scalar>;
  using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  /// |0...0> on `n_qubits` qubits.
  explicit Statevector(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits)
      throw ShapeError("statevector: qubit count " + std::to_string(n_qubits) +
                       " outside [1, " + std::to_string(kMaxQubits) + "]");
    amps_ = Amplitudes::Zero(Eigen::Index{1} << n_qubits);
    amps_[0] = Complex(1);
  }

  int n_qubits() const { return n_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Amplitudes& amplitudes() const { return amps_; }
  Amplitudes& amplitudes() { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

  Scalar norm_squared() const { return amps_.squaredNorm(); }

  /// Stride of qubit q in the amplitude array.
  std::size_t stride(int qubit) const {
    check_qubit(qubit);
    return std::size_t{1} << (n_ - 1 - qubit);
  }

  /// Applies [[m00, m01], [m10, m11]] to `qubit` in place.
  void apply_1q(int qubit, Complex m00, Complex m01, Complex m10, Complex m11) {
    const std::size_t s = stride(qubit);
    const std::size_t d = dim();
    for (std::size_t base = 0; base < d; base += 2 * s)
      for (std::size_t i = base; i < base + s; ++i) {
        const Complex a0 = amps_[i];
        const Complex a1 = amps_[i + s];
        amps_[i] = m00 * a0 + m01 * a1;
        amps_[i + s] = m10 * a0 + m11 * a1;
      }
  }

  void rx(int q, Scalar theta) {
    const Scalar c = std::cos(theta / 2), s = std::sin(theta / 2);
    apply_1q(q, Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0));
  }
  void ry(int q, Scalar theta) {
    const Scalar c = std::cos(theta / 2), s = std::sin(theta / 2);
    apply_1q(q, Complex(c, 0), Complex(-s, 0), Complex(s, 0), Complex(c, 0));
  }
  void rz(int q, Scalar theta) {
    const Complex lo = std::polar(Scalar(1), -theta / 2);
    const Complex hi = std::polar(Scalar(1), theta / 2);
    apply_1q(q, lo, Complex(0), Complex(0), hi);
  }

  void pauli_x(int q) {
    const std::size_t s = stride(q);
    for (std::size_t base = 0; base < dim(); base += 2 * s)
      for (std::size_t i = base; i < base + s; ++i) std::swap(amps_[i], amps_[i + s]);
  }
  void pauli_y(int q) {
    apply_1q(q, Complex(0), Complex(0, -1), Complex(0, 1), Complex(0));
  }
  void pauli_z(int q) {
    const std::size_t s = stride(q);
    for (std::size_t base = 0; base < dim(); base += 2 * s)
      for (std::size_t i = base; i < base + s; ++i) amps_[i + s] = -amps_[i + s];
  }
  /// 0 = identity, 1 = X, 2 = Y, 3 = Z.
  void pauli(int q, int which) {
    switch (which) {
      case 1: pauli_x(q); break;
      case 2: pauli_y(q); break;
      case 3: pauli_z(q); break;
      default: break;
    }
  }

  void cnot(int control, int target) {
    if (control == target) throw ShapeError("cnot: control equals target (" + std::to_string(control) + ")");
    const std::size_t cs = stride(control), ts = stride(target);
    for (std::size_t i = 0; i < dim(); ++i)
      if ((i & cs) && !(i & ts)) std::swap(amps_[i], amps_[i | ts]);
  }

  /// |amplitude|^2 per basis index.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> probabilities() const {
    return amps_.cwiseAbs2();
  }

 private:
  void check_qubit(int q) const {
    if (q < 0 || q >= n_)
      throw ShapeError("statevector: qubit " + std::to_string(q) + " outside register of " +
                       std::to_string(n_));
  }

  int n_;
  Amplitudes amps_;
};

/// Bit value of `qubit` in basis index `index` under the MSB-first convention.
inline int basis_bit(std::size_t index, int qubit, int n_qubits) {
  return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1U);
}

}  // namespace hpqs
