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

#include "hpqs/selftest.hpp"

#include "hpqs/circuit.hpp"
#include "hpqs/gradcheck.hpp"
#include "hpqs/harness.hpp"
#include "hpqs/hybrid.hpp"
#include "hpqs/mps.hpp"
#include "hpqs/nqs.hpp"
#include "hpqs/rng.hpp"
#include "hpqs/shots.hpp"
#include "hpqs/statevector.hpp"
#include "hpqs/target_net.hpp"
#include "hpqs/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

namespace hpqs {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

Circuit random_circuit(int n, int layers, Rng& rng) {
  Circuit c(n);
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q) c.add_rotation(static_cast<GateKind>(rng.below(3)), q);
    if (n > 1) {
      const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (b >= a) ++b;
      c.add_cnot(a, b);
    }
  }
  return c;
}

std::vector<double> random_angles(std::size_t k, Rng& rng) {
  std::vector<double> p(k);
  for (auto& v : p) v = rng.uniform(-kPi, kPi);
  return p;
}

}  // namespace

CheckResult check_simulator(int cases) {
  double norm_err = 0.0, cnot_err = 0.0, ry_err = 0.0, sum_err = 0.0, group_err = 0.0;
  bool nonnegative = true;
  for (int trial = 0; trial < cases; ++trial) {
    Rng rng = Rng::derive(23, "selftest-sim", {static_cast<std::uint64_t>(trial)});
    const int n = 2 + static_cast<int>(rng.below(5));
    const Circuit c = random_circuit(n, 1 + static_cast<int>(rng.below(4)), rng);
    const auto th = random_angles(c.n_slots(), rng);
    Statevector<double> psi(n);
    for (const Gate& g : c.gates()) {
      apply_gate(psi, g, th);
      norm_err = std::max(norm_err, std::abs(psi.norm_squared() - 1.0));
    }
    const auto before = psi.amplitudes();
    const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const int b = (a + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)))) % n;
    psi.cnot(a, b);
    psi.cnot(a, b);
    cnot_err = std::max(cnot_err, (psi.amplitudes() - before).norm());
    const double t = rng.uniform(-kPi, kPi);
    const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    psi.ry(q, t);
    psi.ry(q, -t);
    ry_err = std::max(ry_err, (psi.amplitudes() - before).norm());
    const Eigen::VectorXd p = exact_probabilities(psi);
    nonnegative = nonnegative && p.minCoeff() >= 0.0;
    sum_err = std::max(sum_err, std::abs(p.sum() - 1.0));
    // Grouped Z over a random support equals the sum of per-qubit <Z>.
    std::vector<int> support;
    for (int k = 0; k < n; ++k)
      if (rng.below(2) == 1) support.push_back(k);
    if (support.empty()) support.push_back(0);
    const Eigen::VectorXd z = p.transpose() * z_table(n);
    double expected = 0.0;
    for (int k : support) expected += z[k];
    group_err = std::max(group_err, std::abs(exact_expectation(psi, Observable::z_sum(n, support)) - expected));
  }
  const double worst = std::max({norm_err, cnot_err, ry_err, sum_err, group_err});
  return {"simulator", nonnegative && worst <= 1e-10,
          std::to_string(cases) + " circuits: norm " + fmt("%.1e", norm_err) + ", CNOT^2 " +
              fmt("%.1e", cnot_err) + ", RY(t)RY(-t) " + fmt("%.1e", ry_err) + ", sum(p) " +
              fmt("%.1e", sum_err) + ", grouped Z " + fmt("%.1e", group_err) + " (tol 1e-10)"};
}

CheckResult check_gradients() {
  // Parameter shift in exact mode.
  double shift_err = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    Rng rng = Rng::derive(17, "selftest-shift", {static_cast<std::uint64_t>(trial)});
    const int n = 1 + static_cast<int>(rng.below(6));
    const Circuit c = random_circuit(n, 1 + static_cast<int>(rng.below(3)), rng);
    auto th = random_angles(c.n_slots(), rng);
    std::vector<int> support;
    for (int q = 0; q < n; ++q)
      if (q == 0 || rng.below(2) == 1) support.push_back(q);
    const Observable obs = Observable::z_sum(n, support);
    const auto g = parameter_shift_grad(
        c, th, [&](const Statevector<double>& s) { return exact_expectation(s, obs); });
    Eigen::VectorXd fd(g.size());
    const double h = 1e-6;
    for (std::size_t j = 0; j < th.size(); ++j) {
      const double o = th[j];
      th[j] = o + h;
      const double up = exact_expectation(simulate(c, th), obs);
      th[j] = o - h;
      const double dn = exact_expectation(simulate(c, th), obs);
      th[j] = o;
      fd[static_cast<Eigen::Index>(j)] = (up - dn) / (2 * h);
    }
    shift_err = std::max(shift_err, (g - fd).norm() / std::max(g.norm(), 1e-3));
  }

  using P = const std::vector<Tensor>&;
  struct Case {
    const char* name;
    std::vector<Shape> shapes;
    Objective f;
    double lo = -1.0, hi = 1.0;
  };
  const std::vector<Case> cases = {
      {"matmul", {{3, 4}, {4, 2}}, [](Tape& t, P p) { return ad::sum(t, ad::matmul(t, p[0], p[1])); }},
      {"transpose", {{2, 3}, {3, 2}},
       [](Tape& t, P p) { return ad::sum(t, ad::mul(t, ad::transpose(t, p[0]), p[1])); }},
      {"add_sub", {{2, 3}, {3}},
       [](Tape& t, P p) { return ad::sum(t, ad::mul(t, ad::add(t, p[0], p[1]), ad::sub(t, p[0], p[1]))); }},
      {"softplus", {{6}}, [](Tape& t, P p) { return ad::sum(t, ad::softplus(t, p[0])); }, -3, 3},
      {"sigmoid", {{6}}, [](Tape& t, P p) { return ad::sum(t, ad::sigmoid(t, p[0])); }, -3, 3},
      {"softmax", {{3, 4}, {3, 4}},
       [](Tape& t, P p) { return ad::sum(t, ad::mul(t, ad::softmax(t, p[0]), p[1])); }, -2, 2},
      {"log", {{5}}, [](Tape& t, P p) { return ad::sum(t, ad::log(t, p[0])); }, 0.2, 2.0},
      {"conv2d", {{2, 2, 6, 5}, {3, 2, 3, 2}, {3}},
       [](Tape& t, P p) {
         const Tensor y = ad::conv2d(t, p[0], p[1], p[2]);
         return ad::sum(t, ad::mul(t, y, y));
       }},
      {"avgpool2d", {{1, 2, 5, 4}},
       [](Tape& t, P p) {
         const Tensor y = ad::avgpool2d(t, p[0], 2);
         return ad::sum(t, ad::mul(t, y, y));
       }},
      {"slice_gather", {{10}},
       [](Tape& t, P p) {
         const std::vector<std::size_t> idx{5, 0, 5, 2};
         const Tensor g = ad::gather(t, ad::slice(t, p[0], 2, {6}), idx);
         return ad::sum(t, ad::mul(t, g, g));
       }},
      {"nll_loss", {{4, 3}},
       [](Tape& t, P p) {
         const std::vector<int> y{0, 2, 1, 2};
         return ad::nll_loss(t, ad::log(t, ad::softmax(t, p[0])), y);
       }, -2, 2},
      {"mse_loss", {{3, 2}, {3, 2}}, [](Tape& t, P p) { return ad::mse_loss(t, p[0], p[1]); }},
  };
  double op_err = 0.0;
  std::string worst_op;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    Rng rng = Rng::derive(11, "selftest-ops", {i});
    std::vector<Tensor> params;
    for (const auto& s : cases[i].shapes) params.push_back(random_tensor(s, rng, cases[i].lo, cases[i].hi));
    const double e = max_gradient_error(cases[i].f, params);
    if (e >= op_err) {
      op_err = e;
      worst_op = cases[i].name;
    }
  }

  Rng rng = Rng::derive(11, "selftest-modules");
  const NqsNetwork nqs = NqsNetwork::bitstring_default(4, rng);
  const Tensor w16 = random_tensor({16}, rng);
  w16.set_requires_grad(false);
  const double nqs_err = max_gradient_error(
      [&](Tape& t, P) { return ad::sum(t, ad::mul(t, nqs_distribution(t, nqs, 4), w16)); },
      nqs.parameters());

  const MpsDecoder mps(MpsDecoderOptions{5, 3, 2, 0.5}, rng);
  const Tensor mps_in = random_tensor({3, 5}, rng, 0.1, 0.9);
  const Tensor w_out = random_tensor({3, 2}, rng);
  w_out.set_requires_grad(false);
  std::vector<Tensor> mps_params = mps.cores();
  mps_params.push_back(mps_in);
  const double mps_err = max_gradient_error(
      [&](Tape& t, P) { return ad::sum(t, ad::mul(t, mps.forward(t, mps_in), w_out)); }, mps_params);

  const TargetSpec spec = TargetSpec::qt_desk();
  const Tensor a = random_tensor({spec.param_count()}, rng, -0.3, 0.3);
  const Tensor x = random_tensor({2, 1, 28, 28}, rng, 0.0, 1.0);
  x.set_requires_grad(false);
  const std::vector<int> labels{3, 7};
  const double target_err = max_gradient_error(
      [&](Tape& t, P p) {
        const TargetNetwork net = instantiate_target(t, spec, p[0]);
        return ad::nll_loss(t, ad::log(t, ad::softmax(t, net.forward(t, x))), labels);
      },
      {a});

  const double module_err = std::max({op_err, nqs_err, mps_err, target_err});
  return {"gradients", shift_err <= 1e-6 && module_err <= 1e-4,
          "parameter shift " + fmt("%.1e", shift_err) + " (tol 1e-6); ops " + fmt("%.1e", op_err) +
              " worst " + worst_op + ", NQS " + fmt("%.1e", nqs_err) + ", MPS " +
              fmt("%.1e", mps_err) + ", instantiate_target " + fmt("%.1e", target_err) +
              " (tol 1e-4)"};
}

CheckResult check_statistics() {
  // Fixed 4-qubit circuits: ansatz at fixed angles and a GHZ-like chain.
  std::vector<Eigen::VectorXd> dists;
  {
    const Circuit c = build_qt_ansatz(4, 2);
    std::vector<double> th(c.n_slots());
    for (std::size_t j = 0; j < th.size(); ++j) th[j] = 0.3 + 0.41 * static_cast<double>(j);
    dists.push_back(exact_probabilities(simulate(c, th)));
    Circuit ghz(4);
    ghz.add_rotation(GateKind::RY, 0);
    for (int q = 0; q < 3; ++q) ghz.add_cnot(q, q + 1);
    const std::vector<double> half{kPi / 2};
    dists.push_back(exact_probabilities(simulate(ghz, half)));
  }
  double tv = 0.0;
  for (std::size_t k = 0; k < dists.size(); ++k) {
    Rng rng = Rng::derive(5, "selftest-tv", {k});
    const EmpiricalDistribution emp = sample_shots(dists[k], 4, 1'000'000, rng);
    double d = 0.0;
    for (std::size_t i = 0; i < 16; ++i)
      d += std::abs(static_cast<double>(emp.counts()[i]) / 1e6 - dists[k][static_cast<Eigen::Index>(i)]);
    tv = std::max(tv, 0.5 * d);
  }

  // Per-state deviation |p_hat_i - p_i| >= eps over 1000 repetitions of 320
  // shots against the two-sided bound 2 exp(-2 eps^2 n_shot).
  const Eigen::VectorXd& p = dists[0];
  constexpr int kReps = 1000;
  constexpr std::uint64_t kShots = 320;
  const std::vector<double> eps{0.02, 0.04, 0.06};
  std::vector<std::vector<int>> violations(eps.size(), std::vector<int>(16, 0));
  for (int r = 0; r < kReps; ++r) {
    Rng rng = Rng::derive(6, "selftest-hoeffding", {static_cast<std::uint64_t>(r)});
    const EmpiricalDistribution emp = sample_shots(p, 4, kShots, rng);
    for (std::size_t e = 0; e < eps.size(); ++e)
      for (std::size_t i = 0; i < 16; ++i)
        if (std::abs(static_cast<double>(emp.counts()[i]) / kShots - p[static_cast<Eigen::Index>(i)]) >= eps[e])
          ++violations[e][i];
  }
  bool hoeffding_ok = true;
  std::string hoeffding_detail;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const int worst = *std::max_element(violations[e].begin(), violations[e].end());
    const double rate = static_cast<double>(worst) / kReps;
    const double bound = hoeffding_tail(eps[e], static_cast<double>(kShots));
    hoeffding_ok = hoeffding_ok && rate <= bound;
    hoeffding_detail += (e ? ", " : "") + fmt("eps %.2f: ", eps[e]) + fmt("%.3f", rate) + " <= " +
                        fmt("%.3f", bound);
  }
  const double eps_value = hoeffding_epsilon(4, 320, 0.05);
  const bool eps_ok = std::abs(eps_value - 0.3037) <= 1e-4;
  return {"statistics", tv <= 0.01 && hoeffding_ok && eps_ok,
          "TV at 1e6 shots " + fmt("%.2e", tv) + " (tol 0.01); worst per-state violation rate " +
              hoeffding_detail + "; hoeffding_epsilon(4, 320, 0.05) = " + fmt("%.6f", eps_value)};
}

namespace {

bool same_bits(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() && a.data() == b.data();
}

// Compares lambda in {0, 1} against the branch-only model on `queries`
// queries produced by `run`.
template <typename Run>
int reduction_mismatches(const HpqsModel& hybrid_template, int queries, Run run) {
  int mismatches = 0;
  for (double lambda : {1.0, 0.0}) {
    HpqsModel hybrid = hybrid_template;
    hybrid.lambda = lambda;
    HpqsModel branch = hybrid_template;
    branch.lambda = lambda;
    if (lambda == 1.0) {
      branch.classical.reset();
      branch.h = IdentityPost{};
    } else {
      branch.quantum.reset();
      branch.g = IdentityPost{};
    }
    for (int q = 0; q < queries; ++q)
      if (!same_bits(run(hybrid, q), run(branch, q))) ++mismatches;
  }
  return mismatches;
}

}  // namespace

CheckResult check_reductions(int queries) {
  // Expectation wiring: random feature rows.
  TaskConfig qml = TaskConfig::defaults(TaskKind::Qml);
  qml.variant = Variant::HpqsFinite;
  const HpqsModel qml_model = build_qml_model(qml, 4);
  const int qml_bad = reduction_mismatches(qml_model, queries, [](const HpqsModel& m, int q) {
    Rng rng = Rng::derive(4, "selftest-query", {static_cast<std::uint64_t>(q)});
    Tensor x = Tensor::zeros({1, kQmlFeatures});
    for (Eigen::Index i = 0; i < x.data().size(); ++i) x.data()[i] = rng.uniform(-1.0, 3.0);
    Tape tape;
    return hybrid_expectation_predict(tape, m, x, {4, 9, static_cast<std::uint64_t>(q)}, nullptr);
  });

  // Basis wiring with scalar decoders (transfer) and chunk decoders (adapter).
  auto basis_bad = [&](const HpqsModel& model, std::size_t range) {
    return reduction_mismatches(model, queries, [range](const HpqsModel& m, int q) {
      Rng rng = Rng::derive(4, "selftest-index", {static_cast<std::uint64_t>(q)});
      const std::size_t idx[] = {static_cast<std::size_t>(rng.below(range))};
      Tape tape;
      return hybrid_predict(tape, m, idx, {4, 9, static_cast<std::uint64_t>(q)}, nullptr);
    });
  };
  TaskConfig qt = TaskConfig::defaults(TaskKind::Qt);
  qt.variant = Variant::HpqsFinite;
  const int qt_bad = basis_bad(build_qt_model(qt, 4), TargetSpec::by_name(qt.qt.target).param_count());
  TaskConfig qpa = TaskConfig::defaults(TaskKind::QpaGen);
  qpa.variant = Variant::HpqsFinite;
  const std::size_t chunks = qpa_chunk_count(qpa.qpa.rank * (qpa.qpa.d + qpa.qpa.k), qpa.qpa.n_mlp);
  const int qpa_bad = basis_bad(build_qpa_model(qpa, 4), chunks);

  return {"reductions", qml_bad == 0 && qt_bad == 0 && qpa_bad == 0,
          std::to_string(queries) + " queries per lambda per wiring; mismatches: expectation " +
              std::to_string(qml_bad) + ", transfer " + std::to_string(qt_bad) + ", adapter " +
              std::to_string(qpa_bad)};
}

CheckResult check_qpa_formula() {
  const int gpt = qpa_qubit_count(204100, 512);
  const int gemma = qpa_qubit_count(1032192, 4096);
  // Brute force: count chunks by repeated subtraction, then double until covered.
  auto oracle = [](std::uint64_t m, std::uint64_t n_mlp) {
    std::uint64_t chunks = 0;
    for (std::uint64_t left = m; left > 0; left = left > n_mlp ? left - n_mlp : 0) ++chunks;
    int n = 0;
    while ((std::uint64_t{1} << n) < chunks) ++n;
    return std::max(n, 1);
  };
  int random_bad = 0;
  Rng rng = Rng::derive(19, "selftest-qpa");
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t m = 1 + rng.below(3'000'000);
    const std::uint64_t n_mlp = 1 + rng.below(8192);
    if (qpa_qubit_count(m, n_mlp) != oracle(m, n_mlp)) ++random_bad;
  }

  // Chunk assembly under a shuffled evaluation order and a repeat call.
  TaskConfig cfg = TaskConfig::defaults(TaskKind::QpaGen);
  cfg.variant = Variant::HpqsExact;
  const HpqsModel model = build_qpa_model(cfg, 3);
  const std::size_t chunks = qpa_chunk_count(cfg.qpa.rank * (cfg.qpa.d + cfg.qpa.k), cfg.qpa.n_mlp);
  Rng order_rng = Rng::derive(19, "selftest-order");
  const auto order = permutation(chunks, order_rng);
  Tape t1, t2, t3;
  const LoraFactors base = generate_lora(t1, model, cfg.qpa, {3, 0, 0}, nullptr);
  const LoraFactors shuffled = generate_lora(t2, model, cfg.qpa, {3, 0, 0}, nullptr, &order);
  const LoraFactors again = generate_lora(t3, model, cfg.qpa, {3, 0, 0}, nullptr);
  const bool order_ok = same_bits(base.a, shuffled.a) && same_bits(base.b, shuffled.b) &&
                        same_bits(base.a, again.a) && same_bits(base.b, again.b);
  const bool shapes_ok = base.a.shape() == Shape{cfg.qpa.rank, cfg.qpa.k} &&
                         base.b.shape() == Shape{cfg.qpa.d, cfg.qpa.rank};
  return {"qpa-formula", gpt == 9 && gemma == 8 && random_bad == 0 && order_ok && shapes_ok,
          "N(204100, 512) = " + std::to_string(gpt) + ", N(1032192, 4096) = " + std::to_string(gemma) +
              ", random pairs off oracle " + std::to_string(random_bad) + "/20, chunk order " +
              (order_ok ? "invariant" : "DEPENDENT") + ", A " + shape_string(base.a.shape()) +
              " B " + shape_string(base.b.shape())};
}

CheckResult check_config_roundtrip() {
  int bad = 0;
  for (TaskKind task : {TaskKind::Qml, TaskKind::Qt, TaskKind::QpaGen}) {
    const Json doc = default_config_json(task);
    const ExperimentConfig cfg = parse_config(doc);
    const Json again = to_json(parse_config(to_json(cfg)));
    if (again != doc || config_hash(cfg) != config_hash(parse_config(again))) ++bad;
  }
  return {"config-roundtrip", bad == 0, std::to_string(bad) + " of 3 task defaults changed"};
}

std::vector<CheckResult> run_invariant_checks() {
  return {check_simulator(),  check_gradients(),   check_statistics(),
          check_reductions(), check_qpa_formula(), check_config_roundtrip()};
}

}  // namespace hpqs
