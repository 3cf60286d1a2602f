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

#include <string>
#include <vector>

namespace hpqs {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // measured quantities and the tolerance they were held to
};

/// Norm preservation after every gate, CNOT^2 = I, RY(t) RY(-t) = I,
/// probability normalisation and grouped-Z consistency on `cases` random
/// circuits of 2 to 6 qubits; every error must stay within 1e-10.
CheckResult check_simulator(int cases = 200);

/// Exact-mode parameter shift vs central differences (1e-6 relative), and
/// autodiff ops, NQS, MPS decoder and instantiate_target vs central
/// differences (1e-4 relative).
CheckResult check_gradients();

/// Sampler TV distance at 10^6 shots on fixed 4-qubit circuits (<= 0.01),
/// per-state Hoeffding violation rates over 1000 repetitions against
/// hoeffding_tail, and hoeffding_epsilon(4, 320, 0.05) = 0.3037 +/- 1e-4.
CheckResult check_statistics();

/// lambda = 1 against a quantum-only model and lambda = 0 against a
/// classical-only model, bit-exact on `queries` random queries for the
/// expectation wiring and both basis wirings.
CheckResult check_reductions(int queries = 100);

/// Qubit counts for the two large adapter instances and 20 random
/// (m, n_mlp) pairs against a brute-force oracle; chunk assembly invariant
/// under evaluation order and repeat calls.
CheckResult check_qpa_formula();

/// parse -> serialize -> parse is the identity for every task's defaults.
CheckResult check_config_roundtrip();

/// All of the above in order.
std::vector<CheckResult> run_invariant_checks();

}  // namespace hpqs
