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

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. `--long` runs the full-size transfer experiment instead.

#include "hpqs/harness.hpp"
#include "hpqs/selftest.hpp"
#include "hpqs/tasks.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

namespace {

using hpqs::TaskConfig;
using hpqs::TaskKind;
using hpqs::Variant;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

struct Gate {
  int failures = 0;
  void report(int id, const std::string& title, bool passed, const std::string& detail) {
    std::printf("[%s] criterion %d: %s -- %s\n", passed ? "PASS" : "FAIL", id, title.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!passed) ++failures;
  }
};

// Runs a selftest check and adds its wall-clock limit.
void timed_check(Gate& gate, int id, const std::string& title, double limit_s,
                 const std::function<hpqs::CheckResult()>& check) {
  const auto start = Clock::now();
  const hpqs::CheckResult r = check();
  const double t = seconds_since(start);
  gate.report(id, title, r.passed && t < limit_s,
              r.detail + fmt("; %.1f s (limit %.0f s)", t, limit_s));
}

// Mean final test accuracy in percent over the configured seeds.
template <typename Data, typename Runner>
double mean_accuracy(const TaskConfig& cfg, const Data& data, Runner run) {
  double total = 0.0;
  for (auto seed : cfg.seeds) {
    const hpqs::SeedResult r = run(cfg, data, seed, {});
    total += 100.0 * r.epochs.back().accuracy.value_or(0.0);
  }
  return total / static_cast<double>(cfg.seeds.size());
}

TaskConfig with(TaskConfig cfg, Variant v, const char* noise) {
  cfg.variant = v;
  cfg.noise = hpqs::builtin_noise_presets().at(noise);
  return cfg;
}

int run_long() {
  TaskConfig cfg = TaskConfig::defaults(TaskKind::Qt);
  cfg.qt.target = "default";
  // Every image under the data root.
  cfg.qt.train_limit = static_cast<std::size_t>(-1);
  cfg.qt.test_limit = static_cast<std::size_t>(-1);
  cfg.epochs = 50;
  cfg.learning_rate = 1e-4;
  const auto data = hpqs::prepare_qt_data(hpqs::load_mnist(hpqs::default_data_root()), cfg.qt);
  const auto start = Clock::now();
  const double acc = mean_accuracy(with(cfg, Variant::HpqsFinite, "ideal"), data, hpqs::run_qt);
  Gate gate;
  gate.report(7, "full-size transfer run, 13 qubits, 50 epochs", acc >= 84.0,
              fmt("HPQS %.2f%% (target >= 84%%); %.0f s", acc, seconds_since(start)));
  return gate.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strcmp(argv[1], "--long") == 0) return run_long();

  Gate gate;
  timed_check(gate, 1, "simulator correctness", 60, [] { return hpqs::check_simulator(200); });
  timed_check(gate, 2, "gradient oracles", 120, [] { return hpqs::check_gradients(); });
  timed_check(gate, 3, "shot statistics", 120, [] { return hpqs::check_statistics(); });
  timed_check(gate, 4, "lambda reductions", 600, [] { return hpqs::check_reductions(100); });
  timed_check(gate, 5, "adapter qubit formula", 600, [] { return hpqs::check_qpa_formula(); });

  // Classification runs shared by criteria 6 and 8.
  const TaskConfig qml = TaskConfig::defaults(TaskKind::Qml);
  const auto mnist = hpqs::load_mnist(hpqs::default_data_root());
  const auto qml_data = hpqs::prepare_qml_data(mnist, qml.qml);
  auto start = Clock::now();
  const double hpqs_ideal = mean_accuracy(with(qml, Variant::HpqsFinite, "ideal"), qml_data, hpqs::run_qml);
  const double pqc_ideal = mean_accuracy(with(qml, Variant::PqcFinite, "ideal"), qml_data, hpqs::run_qml);
  const double qml_ideal_s = seconds_since(start);
  gate.report(6, "desk-scale classification bands",
              hpqs_ideal >= 85.0 && pqc_ideal <= 70.0 && hpqs_ideal - pqc_ideal >= 10.0 &&
                  qml_ideal_s < 1800.0,
              fmt("HPQS %.2f%% (>= 85), PQC %.2f%% (<= 70), ", hpqs_ideal, pqc_ideal) +
                  fmt("gap %.2f (>= 10); %.0f s", hpqs_ideal - pqc_ideal, qml_ideal_s));

  start = Clock::now();
  const TaskConfig qt = TaskConfig::defaults(TaskKind::Qt);
  const auto qt_data = hpqs::prepare_qt_data(mnist, qt.qt);
  const double qt_hpqs = mean_accuracy(with(qt, Variant::HpqsFinite, "ideal"), qt_data, hpqs::run_qt);
  const double qt_pqc = mean_accuracy(with(qt, Variant::PqcFinite, "ideal"), qt_data, hpqs::run_qt);
  const double qt_s = seconds_since(start);
  gate.report(7, "desk-scale transfer ordering", qt_hpqs >= qt_pqc + 5.0 && qt_s < 2700.0,
              fmt("HPQS %.2f%%, PQC %.2f%%, margin %.2f (>= 5); ", qt_hpqs, qt_pqc, qt_hpqs - qt_pqc) +
                  fmt("%.0f s", qt_s));

  const double hpqs_noisy = mean_accuracy(with(qml, Variant::HpqsFinite, "noisy-a"), qml_data, hpqs::run_qml);
  const double pqc_noisy = mean_accuracy(with(qml, Variant::PqcFinite, "noisy-a"), qml_data, hpqs::run_qml);
  const double hpqs_drop = hpqs_ideal - hpqs_noisy, pqc_drop = pqc_ideal - pqc_noisy;
  gate.report(8, "noise robustness trend", hpqs_drop < pqc_drop,
              fmt("HPQS drop %.2f, PQC drop %.2f points under noisy-a", hpqs_drop, pqc_drop));

  TaskConfig qpa = TaskConfig::defaults(TaskKind::QpaGen);
  qpa.epochs = 1;
  bool decreased = true;
  std::string losses;
  for (auto seed : qpa.seeds) {
    const hpqs::SeedResult r = hpqs::run_qpa_gen(qpa, seed);
    decreased = decreased && r.epochs[1].loss < r.epochs[0].loss;
    if (!losses.empty()) losses += ", ";
    losses += fmt("%.4g -> %.4g", r.epochs[0].loss, r.epochs[1].loss);
  }
  gate.report(9, "adapter toy run: one epoch lowers the reconstruction loss", decreased,
              "seeds 1-3: " + losses);

  std::printf("%d of 9 criteria failed\n", gate.failures);
  return gate.failures == 0 ? 0 : 1;
}
