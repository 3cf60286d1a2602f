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

#include "hpqs/error.hpp"
#include "hpqs/mnist.hpp"
#include "hpqs/tasks.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <string>

namespace hpqs {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hpqs-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ImageSet synthetic_images(std::size_t n, std::uint64_t seed) {
  ImageSet set;
  set.rows = 28;
  set.cols = 28;
  set.pixels.resize(static_cast<Eigen::Index>(n), 28 * 28);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < set.pixels.size(); ++i)
    set.pixels.data()[i] = std::round(rng.uniform() * 255.0) / 255.0;
  for (std::size_t i = 0; i < n; ++i) set.labels.push_back(static_cast<int>(i % 10));
  return set;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

// ------------------------------------------------------------------ mnist

TEST(Mnist, IdxRoundTrip) {
  const fs::path dir = scratch("idx");
  const ImageSet set = synthetic_images(12, 1);
  write_idx(dir / "img", dir / "lab", set);
  const ImageSet back = load_idx(dir / "img", dir / "lab");
  EXPECT_EQ(back.rows, 28u);
  EXPECT_EQ(back.labels, set.labels);
  EXPECT_LE((back.pixels - set.pixels).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(load_idx(dir / "img", dir / "lab", 5).size(), 5u);
}

TEST(Mnist, BadMagicIsDataError) {
  const fs::path dir = scratch("magic");
  write_idx(dir / "img", dir / "lab", synthetic_images(3, 2));
  std::string bytes = read_bytes(dir / "img");
  bytes[3] = 0x07;
  write_bytes(dir / "img", bytes);
  EXPECT_THROW(load_idx(dir / "img", dir / "lab"), DataError);
}

TEST(Mnist, TruncatedPixelsAreDataError) {
  const fs::path dir = scratch("trunc");
  write_idx(dir / "img", dir / "lab", synthetic_images(3, 3));
  const std::string bytes = read_bytes(dir / "img");
  write_bytes(dir / "img", bytes.substr(0, bytes.size() - 10));
  EXPECT_THROW(load_idx(dir / "img", dir / "lab"), DataError);
}

TEST(Mnist, LabelAboveRangeIsDataError) {
  const fs::path dir = scratch("label");
  ImageSet set = synthetic_images(3, 4);
  set.labels[1] = 11;
  write_idx(dir / "img", dir / "lab", set);
  EXPECT_THROW(load_idx(dir / "img", dir / "lab"), DataError);
}

TEST(Mnist, MissingFileNamesThePath) {
  const fs::path dir = scratch("missing");
  try {
    load_mnist(dir);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("train-images-idx3-ubyte"), std::string::npos);
  }
}

TEST(Mnist, FilterRelabelsByPosition) {
  const ImageSet set = synthetic_images(30, 5);
  const ImageSet f = filter_classes(set, {6, 3});
  ASSERT_EQ(f.size(), 6u);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f.labels[i], i % 2 == 0 ? 1 : 0);
  EXPECT_TRUE(f.pixels.row(0) == set.pixels.row(3));
}

TEST(Mnist, AvgPoolOfConstantIsConstant) {
  ImageSet set = synthetic_images(2, 6);
  set.pixels.setConstant(0.25);
  const Eigen::MatrixXd f = avgpool_features(set, 6);
  EXPECT_EQ(f.cols(), 16);
  EXPECT_LE((f.array() - 0.25).abs().maxCoeff(), 1e-15);
}

TEST(Mnist, BundledSubsetSizes) {
  const fs::path root = default_data_root();
  if (!fs::exists(root / "train-images-idx3-ubyte")) GTEST_SKIP() << "no MNIST files at " << root;
  const MnistSplits m = load_mnist(root);
  EXPECT_EQ(m.train.size(), 4000u);
  EXPECT_EQ(m.test.size(), 1000u);
  std::set<int> labels(m.train.labels.begin(), m.train.labels.end());
  EXPECT_EQ(labels.size(), 10u);
}

// ------------------------------------------------------------------ counting

TEST(Counting, CeilLog2) {
  EXPECT_EQ(ceil_log2(1), 0u);
  EXPECT_EQ(ceil_log2(2), 1u);
  EXPECT_EQ(ceil_log2(3), 2u);
  EXPECT_EQ(ceil_log2(1024), 10u);
  EXPECT_EQ(ceil_log2(1025), 11u);
}

TEST(Counting, AdapterQubitsForLargeInstances) {
  EXPECT_EQ(qpa_qubit_count(204100, 512), 9);
  EXPECT_EQ(qpa_qubit_count(1032192, 4096), 8);
  EXPECT_EQ(qpa_qubit_count(1, 64), 1);
  EXPECT_THROW(qpa_chunk_count(0, 64), ConfigError);
  EXPECT_THROW(qpa_chunk_count(10, 0), ConfigError);
}

TEST(Counting, AdapterQubitsMatchLinearSearch) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 1e6);
    const std::size_t c = 1 + static_cast<std::size_t>(rng.uniform() * 500);
    std::size_t chunks = 0;
    while (chunks * c < m) ++chunks;
    int n = 0;
    while ((std::size_t{1} << n) < chunks) ++n;
    EXPECT_EQ(qpa_qubit_count(m, c), std::max(n, 1)) << m << " " << c;
  }
}

// ------------------------------------------------------------------ generation

TEST(Generation, LoraShapesForDefaults) {
  TaskConfig cfg = TaskConfig::defaults(TaskKind::QpaGen);
  const HpqsModel model = build_qpa_model(cfg, 1);
  EXPECT_EQ(model.quantum->n_qubits(), 3);
  Tape tape;
  const LoraFactors f = generate_lora(tape, model, cfg.qpa, {1, 0, 0}, nullptr);
  EXPECT_EQ(f.a.shape(), (Shape{4, 64}));
  EXPECT_EQ(f.b.shape(), (Shape{64, 4}));
}

TEST(Generation, ChunkOrderDoesNotMatterInExactMode) {
  TaskConfig cfg = TaskConfig::defaults(TaskKind::QpaGen);
  cfg.variant = Variant::HpqsExact;
  const HpqsModel model = build_qpa_model(cfg, 2);
  const std::vector<std::size_t> reversed{7, 6, 5, 4, 3, 2, 1, 0};
  Tape t1, t2;
  const LoraFactors a = generate_lora(t1, model, cfg.qpa, {2, 0, 0}, nullptr);
  const LoraFactors b = generate_lora(t2, model, cfg.qpa, {2, 0, 0}, nullptr, &reversed);
  EXPECT_TRUE(a.a.data() == b.a.data());
  EXPECT_TRUE(a.b.data() == b.b.data());
}

TEST(Generation, CenteredWeightsHaveZeroMean) {
  TaskConfig cfg = TaskConfig::defaults(TaskKind::Qt);
  cfg.variant = Variant::HpqsExact;
  const HpqsModel model = build_qt_model(cfg, 3);
  Tape tape;
  const Tensor a = generate_weights(tape, model, 906, true, {3, 0, 0}, nullptr);
  EXPECT_EQ(a.numel(), 906u);
  EXPECT_LE(std::abs(a.data().mean()), 1e-12);
}

// ------------------------------------------------------------------ runs

QmlData synthetic_qml(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  QmlData d;
  auto fill = [&](Eigen::MatrixXd& x, std::vector<int>& y) {
    x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kQmlFeatures));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int label = static_cast<int>(i % 2);
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform(-1, 1) + (label ? 0.8 : -0.8);
      y.push_back(label);
    }
  };
  fill(d.train_x, d.train_y);
  fill(d.test_x, d.test_y);
  return d;
}

QtData synthetic_qt(std::size_t n, std::uint64_t seed) {
  const ImageSet set = synthetic_images(n, seed);
  MnistSplits m{set, set};
  QtSettings s;
  s.train_limit = n;
  s.test_limit = n;
  return prepare_qt_data(m, s);
}

TaskConfig small(TaskKind task) {
  TaskConfig cfg = TaskConfig::defaults(task);
  cfg.epochs = 1;
  cfg.optimizer = OptimizerKind::SGD;
  cfg.weight_decay = 0.0;
  return cfg;
}

TEST(Runs, ClassicalOnlyQmlStepLowersLoss) {
  TaskConfig cfg = small(TaskKind::Qml);
  cfg.variant = Variant::Nqs;
  cfg.learning_rate = 0.05;
  const SeedResult r = run_qml(cfg, synthetic_qml(32, 1), 1);
  ASSERT_EQ(r.epochs.size(), 2u);
  EXPECT_TRUE(std::isnan(r.epochs[0].train_loss));
  EXPECT_LT(r.epochs[1].loss, r.epochs[0].loss);
}

TEST(Runs, ClassicalOnlyQtStepLowersLoss) {
  TaskConfig cfg = small(TaskKind::Qt);
  cfg.variant = Variant::Nqs;
  cfg.learning_rate = 1e-2;
  cfg.batch_size = 8;
  const SeedResult r = run_qt(cfg, synthetic_qt(16, 2), 1);
  EXPECT_LT(r.epochs[1].loss, r.epochs[0].loss);
  EXPECT_EQ(r.n_qubits, 10u);
}

TEST(Runs, ClassicalOnlyQpaStepLowersLoss) {
  TaskConfig cfg = small(TaskKind::QpaGen);
  cfg.variant = Variant::Nqs;
  cfg.learning_rate = 1e-2;
  cfg.qpa.samples = 64;
  const SeedResult r = run_qpa_gen(cfg, 1);
  EXPECT_LT(r.epochs[1].loss, r.epochs[0].loss);
  EXPECT_FALSE(r.epochs[1].accuracy.has_value());
}

TEST(Runs, FullLambdaQtMatchesQuantumOnlyVariant) {
  const QtData data = synthetic_qt(16, 3);
  TaskConfig hybrid = small(TaskKind::Qt);
  hybrid.batch_size = 8;
  hybrid.lambda = 1.0;
  TaskConfig pqc = hybrid;
  pqc.variant = Variant::PqcFinite;
  const SeedResult a = run_qt(hybrid, data, 4);
  const SeedResult b = run_qt(pqc, data, 4);
  ASSERT_EQ(a.epochs.size(), b.epochs.size());
  for (std::size_t e = 0; e < a.epochs.size(); ++e) {
    EXPECT_EQ(a.epochs[e].loss, b.epochs[e].loss);
    EXPECT_EQ(a.epochs[e].accuracy, b.epochs[e].accuracy);
  }
}

TEST(Runs, FullLambdaQmlMatchesQuantumOnlyVariant) {
  const QmlData data = synthetic_qml(16, 5);
  TaskConfig hybrid = small(TaskKind::Qml);
  hybrid.lambda = 1.0;
  hybrid.qml.group_affine = false;
  TaskConfig pqc = hybrid;
  pqc.variant = Variant::PqcFinite;
  const SeedResult a = run_qml(hybrid, data, 6);
  const SeedResult b = run_qml(pqc, data, 6);
  for (std::size_t e = 0; e < a.epochs.size(); ++e) {
    EXPECT_EQ(a.epochs[e].loss, b.epochs[e].loss);
    EXPECT_EQ(a.epochs[e].accuracy, b.epochs[e].accuracy);
  }
}

TEST(Runs, SameSeedSameResult) {
  const QmlData data = synthetic_qml(16, 7);
  TaskConfig cfg = small(TaskKind::Qml);
  const SeedResult a = run_qml(cfg, data, 2);
  const SeedResult b = run_qml(cfg, data, 2);
  const SeedResult c = run_qml(cfg, data, 3);
  EXPECT_EQ(a.epochs[1].loss, b.epochs[1].loss);
  EXPECT_NE(a.epochs[1].loss, c.epochs[1].loss);
}

TEST(Runs, ExactVariantRejectsNoise) {
  TaskConfig cfg = small(TaskKind::Qml);
  cfg.variant = Variant::HpqsExact;
  cfg.noise = builtin_noise_presets().at("noisy-a");
  EXPECT_THROW(build_qml_model(cfg, 1), ConfigError);
}

}  // namespace
}  // namespace hpqs
