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
#include "hpqs/error.hpp"
#include "hpqs/rng.hpp"
#include "hpqs/statevector.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

namespace hpqs {
namespace {

constexpr double kPi = std::numbers::pi;

Circuit random_circuit(int n, int layers, Rng& rng) {
  Circuit c(n);
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q)
      c.add_rotation(static_cast<GateKind>(rng.below(3)), q);
    if (n > 1) {
      const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (b >= a) ++b;
      c.add_cnot(a, b);
    }
  }
  return c;
}

std::vector<double> random_params(std::size_t k, Rng& rng) {
  std::vector<double> p(k);
  for (auto& v : p) v = rng.uniform(-kPi, kPi);
  return p;
}

TEST(Ansatz, QtCounts) {
  EXPECT_EQ(build_qt_ansatz(13, 1).n_slots(), 13u);
  EXPECT_EQ(build_qt_ansatz(9, 8).n_slots(), 72u);
}

TEST(Ansatz, SmallestChain) {
  const Circuit c = build_qt_ansatz(2, 1);
  ASSERT_EQ(c.gates().size(), 3u);
  EXPECT_EQ(c.gates()[0].kind, GateKind::RY);
  EXPECT_EQ(c.gates()[0].target, 0);
  EXPECT_EQ(c.gates()[1].kind, GateKind::RY);
  EXPECT_EQ(c.gates()[1].target, 1);
  EXPECT_EQ(c.gates()[2].kind, GateKind::CNOT);
  EXPECT_EQ(c.gates()[2].control, 0);
  EXPECT_EQ(c.gates()[2].target, 1);
}

TEST(Ansatz, RejectsBadBounds) {
  EXPECT_THROW(build_qt_ansatz(0, 1), ShapeError);
  EXPECT_THROW(build_qt_ansatz(3, 0), ShapeError);
  EXPECT_THROW(Circuit(17), ShapeError);
  Circuit c(2);
  EXPECT_THROW(c.add_cnot(1, 1), ShapeError);
  EXPECT_THROW(c.add_rotation(GateKind::RX, 2), ShapeError);
}

TEST(QmlEncoder, SlotLayout) {
  const Circuit c = build_qml_circuit();
  EXPECT_EQ(c.n_qubits(), 4);
  EXPECT_EQ(c.n_slots(), 16u + 40u);
  const GateKind order[] = {GateKind::RY, GateKind::RZ, GateKind::RX, GateKind::RY};
  for (int s = 0; s < 16; ++s) {
    EXPECT_EQ(c.gates()[static_cast<std::size_t>(s)].kind, order[s / 4]);
    EXPECT_EQ(c.gates()[static_cast<std::size_t>(s)].target, s % 4);
    EXPECT_EQ(c.gates()[static_cast<std::size_t>(s)].slot, s);
  }
}

TEST(QmlEncoder, ZeroFeaturesActAsIdentity) {
  Circuit enc = build_qml_circuit(0);
  const std::vector<double> zeros(16, 0.0);
  const auto p = exact_probabilities(simulate(enc, bind_qml_parameters(zeros, {})));
  EXPECT_NEAR(p[0], 1.0, 1e-15);
}

TEST(QmlEncoder, WrongFeatureCount) {
  const std::vector<double> f(15, 0.1);
  EXPECT_THROW(bind_qml_parameters(f, {}), ShapeError);
}

TEST(Simulate, RyPiFlips) {
  Circuit c(1);
  c.add_rotation(GateKind::RY, 0);
  const std::vector<double> th{kPi};
  const auto p = exact_probabilities(simulate(c, th));
  EXPECT_NEAR(p[0], 0.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0, 1e-15);
}

TEST(Simulate, BellLikeState) {
  Circuit c(2);
  c.add_rotation(GateKind::RY, 0);
  c.add_cnot(0, 1);
  const std::vector<double> th{kPi / 2};
  const auto p = exact_probabilities(simulate(c, th));
  EXPECT_NEAR(p[0], 0.5, 1e-12);
  EXPECT_NEAR(p[1], 0.0, 1e-12);
  EXPECT_NEAR(p[2], 0.0, 1e-12);
  EXPECT_NEAR(p[3], 0.5, 1e-12);
}

TEST(Simulate, EmptyCircuit) {
  const auto p = exact_probabilities(simulate(Circuit(3), {}));
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p.sum(), 1.0);
}

TEST(Simulate, ParameterLengthMismatch) {
  const std::vector<double> th{0.1};
  EXPECT_THROW(simulate(build_qt_ansatz(2, 1), th), ShapeError);
}

TEST(Simulate, UniformProductState) {
  for (int n = 1; n <= 5; ++n) {
    Circuit c(n);
    for (int q = 0; q < n; ++q) c.add_rotation(GateKind::RY, q);
    const std::vector<double> th(static_cast<std::size_t>(n), kPi / 2);
    const auto p = exact_probabilities(simulate(c, th));
    for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], std::ldexp(1.0, -n), 1e-12);
  }
}

TEST(BitConvention, QubitZeroIsMostSignificant) {
  Statevector<double> psi(3);
  psi.pauli_x(0);
  EXPECT_NEAR(std::abs(psi[4]), 1.0, 1e-15);  // |100> = index 4
  Statevector<double> phi(3);
  phi.pauli_x(2);
  EXPECT_NEAR(std::abs(phi[1]), 1.0, 1e-15);
  EXPECT_TRUE(basis_bit(4, 0, 3));
  EXPECT_FALSE(basis_bit(4, 2, 3));
}

TEST(Expectation, SingleQubitCases) {
  Statevector<double> zero(1);
  EXPECT_EQ(exact_expectation(zero, Observable::z(1, 0)), 1.0);
  for (double th : {0.0, 0.3, 1.2, kPi / 2, 2.9}) {
    Statevector<double> psi(1);
    psi.ry(0, th);
    EXPECT_NEAR(exact_expectation(psi, Observable::z(1, 0)), std::cos(th), 1e-12);
  }
  Statevector<double> two(2);
  EXPECT_EQ(exact_expectation(two, Observable::z_sum(2, {0, 1})), 2.0);
}

TEST(ParameterShift, RyAtHalfPi) {
  Circuit c(1);
  c.add_rotation(GateKind::RY, 0);
  const std::vector<double> th{kPi / 2};
  const auto g = parameter_shift_grad(c, th, [](const Statevector<double>& s) {
    return exact_expectation(s, Observable::z(1, 0));
  });
  EXPECT_NEAR(g[0], -1.0, 1e-12);
}

TEST(ParameterShift, ConstantReadoutGivesZero) {
  Rng rng(5);
  const Circuit c = random_circuit(3, 2, rng);
  const auto th = random_params(c.n_slots(), rng);
  const auto g = parameter_shift_grad(c, th, [](const Statevector<double>&) { return 0.7; });
  EXPECT_EQ(g.norm(), 0.0);
}

TEST(ParameterShift, MatchesFiniteDifferenceOnRandomCircuits) {
  for (int trial = 0; trial < 30; ++trial) {
    Rng rng = Rng::derive(17, "pshift", {static_cast<std::uint64_t>(trial)});
    const int n = 1 + static_cast<int>(rng.below(6));
    const int layers = 1 + static_cast<int>(rng.below(3));
    const Circuit c = random_circuit(n, layers, rng);
    auto th = random_params(c.n_slots(), rng);
    std::vector<int> support;
    for (int q = 0; q < n; ++q)
      if (rng.below(2) || q == 0) support.push_back(q);
    const Observable obs = Observable::z_sum(n, support);
    auto f = [&](const std::vector<double>& p) { return exact_expectation(simulate(c, p), obs); };
    const auto g = parameter_shift_grad(
        c, th, [&](const Statevector<double>& s) { return exact_expectation(s, obs); });
    Eigen::VectorXd fd(g.size());
    const double h = 1e-6;
    for (std::size_t j = 0; j < th.size(); ++j) {
      const double o = th[j];
      th[j] = o + h;
      const double up = f(th);
      th[j] = o - h;
      const double dn = f(th);
      th[j] = o;
      fd[static_cast<Eigen::Index>(j)] = (up - dn) / (2 * h);
    }
    const double rel = (g - fd).norm() / std::max(g.norm(), 1e-3);
    EXPECT_LE(rel, 1e-6) << "trial " << trial;
  }
}

TEST(SimulatorProperties, NormAndIdentities) {
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng = Rng::derive(23, "props", {static_cast<std::uint64_t>(trial)});
    const int n = 2 + static_cast<int>(rng.below(5));
    const Circuit c = random_circuit(n, 3, rng);
    const auto th = random_params(c.n_slots(), rng);
    Statevector<double> psi(n);
    for (const Gate& g : c.gates()) {
      apply_gate(psi, g, th);
      EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-10);
    }
    const auto before = psi.amplitudes();
    psi.cnot(0, 1);
    psi.cnot(0, 1);
    EXPECT_LE((psi.amplitudes() - before).norm(), 1e-10);
    const double a = rng.uniform(-kPi, kPi);
    psi.ry(n - 1, a);
    psi.ry(n - 1, -a);
    EXPECT_LE((psi.amplitudes() - before).norm(), 1e-10);
    const auto p = exact_probabilities(psi);
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_NEAR(p.sum(), 1.0, 1e-10);
    const Eigen::VectorXd z = p.transpose() * z_table(n);
    const double grouped = exact_expectation(psi, Observable::z_sum(n, {0, n - 1}));
    EXPECT_NEAR(grouped, z[0] + z[n - 1], 1e-10);
  }
}

TEST(Simulate, SinglePrecisionTracksDouble) {
  Rng rng(99);
  const Circuit c = random_circuit(4, 3, rng);
  const auto th = random_params(c.n_slots(), rng);
  const Eigen::VectorXd d = simulate<double>(c, th).probabilities();
  const Eigen::VectorXd f = simulate<float>(c, th).probabilities().cast<double>();
  EXPECT_LE((d - f).cwiseAbs().maxCoeff(), 1e-5);
}

}  // namespace
}  // namespace hpqs
