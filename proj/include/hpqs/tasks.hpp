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

#include "hpqs/hybrid.hpp"
#include "hpqs/mnist.hpp"
#include "hpqs/optim.hpp"
#include "hpqs/shots.hpp"
#include "hpqs/target_net.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hpqs {

enum class TaskKind { Qml, Qt, QpaGen };
TaskKind parse_task_kind(const std::string& name);
std::string to_string(TaskKind kind);

/// pqc_*: quantum branch only (lambda = 1); nqs: classical branch only
/// (lambda = 0); hpqs_*: both branches blended with the configured lambda.
enum class Variant { PqcExact, PqcFinite, Nqs, HpqsExact, HpqsFinite };
Variant parse_variant(const std::string& name);
std::string to_string(Variant v);
bool uses_quantum(Variant v);
bool uses_classical(Variant v);
ReadoutMode readout_mode(Variant v);

struct QmlSettings {
  int layers = 5;
  std::vector<int> classes{3, 6};
  std::size_t pool_kernel = 6;
  /// Pixels are standardised as (x - mean) / std before pooling.
  double feature_mean = 0.1307;
  double feature_std = 0.3081;
  /// Trainable per-group scale and shift inside G (hpqs variants only).
  bool group_affine = true;
  std::size_t train_limit = 0;
  std::size_t test_limit = 0;
};

struct QtSettings {
  std::string target = "desk";
  int layers = 1;
  std::size_t nqs_hidden = 32;
  std::size_t bond_g = 2;
  std::size_t bond_h = 1;
  double decoder_init_noise = 1e-2;
  bool decoder_passthrough = true;
  /// Subtract the mean of the generated vector before instantiation.
  bool center = true;
  std::size_t train_limit = 2000;
  std::size_t test_limit = 500;
};

struct QpaSettings {
  std::size_t d = 64;
  std::size_t k = 64;
  std::size_t rank = 4;
  std::size_t n_mlp = 64;
  double alpha = 8.0;
  int layers = 8;
  std::size_t nqs_hidden = 32;
  std::size_t bond_g = 10;
  std::size_t bond_h = 4;
  double decoder_init_noise = 1e-2;
  bool decoder_passthrough = true;
  bool center = true;
  std::size_t samples = 256;
  std::uint64_t data_seed = 7;
};

struct TaskConfig {
  TaskKind task = TaskKind::Qml;
  Variant variant = Variant::HpqsFinite;
  double lambda = 0.1;
  double shot_multiplier = 20.0;
  NoisePreset noise;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int epochs = 5;
  double learning_rate = 5e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double weight_decay = 0.0;
  std::size_t batch_size = 16;
  std::filesystem::path data_root;
  QmlSettings qml;
  QtSettings qt;
  QpaSettings qpa;

  /// Desk-scale defaults for each task family.
  static TaskConfig defaults(TaskKind task);
  /// lambda forced by the variant (1 for pqc, 0 for nqs) or the configured one.
  double effective_lambda() const;
};

struct EpochRecord {
  int epoch = 0;
  /// Full training-set objective after the epoch (epoch 0: before training).
  double loss = 0.0;
  /// Mean minibatch loss seen during the epoch; NaN for epoch 0.
  double train_loss = 0.0;
  /// Held-out accuracy in [0, 1]; empty for regression tasks.
  std::optional<double> accuracy;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  std::size_t trainable_count = 0;
  std::size_t n_qubits = 0;
  std::uint64_t shots_per_evaluation = 0;
};

// ------------------------------------------------------------------ data

struct QmlData {
  Eigen::MatrixXd train_x, test_x;  // [N, 16]
  std::vector<int> train_y, test_y;
};
QmlData prepare_qml_data(const MnistSplits& mnist, const QmlSettings& s);

struct QtData {
  Tensor train_x, test_x;  // [N, 1, 28, 28]
  std::vector<int> train_y, test_y;
};
QtData prepare_qt_data(const MnistSplits& mnist, const QtSettings& s);

// ------------------------------------------------------------------ models

HpqsModel build_qml_model(const TaskConfig& cfg, std::uint64_t seed);
/// Basis wiring with scalar MPS decoders over (bits, value).
HpqsModel build_qt_model(const TaskConfig& cfg, std::uint64_t seed);
/// Basis wiring with d_out = n_mlp decoders.
HpqsModel build_qpa_model(const TaskConfig& cfg, std::uint64_t seed);

/// ceil(log2 m) with ceil_log2(1) = 0.
unsigned ceil_log2(std::uint64_t m);
/// Qubits for a target network of m weights: ceil(log2 m), at least 1.
int qt_qubit_count(std::size_t m);
/// ceil(m / n_mlp); ConfigError when the result would be zero.
std::size_t qpa_chunk_count(std::size_t m, std::size_t n_mlp);
/// ceil(log2 ceil(m / n_mlp)), at least 1.
int qpa_qubit_count(std::size_t m, std::size_t n_mlp);

/// Generated weight vector a (length `m`) for the basis wiring, evaluated on
/// basis indices in `order` and scattered back to ascending position.
Tensor generate_weights(Tape& tape, const HpqsModel& model, std::size_t m, bool center,
                        const ReadoutContext& ctx, ReadoutTrace* trace,
                        const std::vector<std::size_t>* order = nullptr);

struct LoraFactors {
  Tensor a;  // [rank, k]
  Tensor b;  // [d, rank]
};
/// Chunked generation of the LoRA factors: chunk i comes from basis state i
/// on N qubits; the flat vector is cut into A then B (row-major), the tail
/// beyond r(d + k) is dropped.
LoraFactors generate_lora(Tape& tape, const HpqsModel& model, const QpaSettings& s,
                          const ReadoutContext& ctx, ReadoutTrace* trace,
                          const std::vector<std::size_t>* order = nullptr);

// ------------------------------------------------------------------ runs

/// Called after every evaluation (epoch 0 included).
using EpochCallback = std::function<void(std::uint64_t seed, const EpochRecord&)>;

SeedResult run_qml(const TaskConfig& cfg, const QmlData& data, std::uint64_t seed,
                   const EpochCallback& on_epoch = {});
SeedResult run_qt(const TaskConfig& cfg, const QtData& data, std::uint64_t seed,
                  const EpochCallback& on_epoch = {});
SeedResult run_qpa_gen(const TaskConfig& cfg, std::uint64_t seed,
                       const EpochCallback& on_epoch = {});

/// Loads whatever data the task needs and runs one seed.
SeedResult run_task_seed(const TaskConfig& cfg, std::uint64_t seed,
                         const EpochCallback& on_epoch = {});

/// Fisher-Yates permutation of [0, n) from `rng`.
std::vector<std::size_t> permutation(std::size_t n, Rng& rng);

}  // namespace hpqs
