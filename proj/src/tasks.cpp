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

#include "hpqs/tasks.hpp"

#include "hpqs/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace hpqs {

// ------------------------------------------------------------ enums

TaskKind parse_task_kind(const std::string& name) {
  if (name == "qml") return TaskKind::Qml;
  if (name == "qt") return TaskKind::Qt;
  if (name == "qpa-gen") return TaskKind::QpaGen;
  throw ConfigError("unknown task '" + name + "' (expected qml, qt or qpa-gen)");
}

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Qml: return "qml";
    case TaskKind::Qt: return "qt";
    case TaskKind::QpaGen: return "qpa-gen";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  if (name == "pqc_exact") return Variant::PqcExact;
  if (name == "pqc_finite") return Variant::PqcFinite;
  if (name == "nqs") return Variant::Nqs;
  if (name == "hpqs_exact") return Variant::HpqsExact;
  if (name == "hpqs_finite") return Variant::HpqsFinite;
  throw ConfigError("unknown variant '" + name +
                    "' (expected pqc_exact, pqc_finite, nqs, hpqs_exact or hpqs_finite)");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::PqcExact: return "pqc_exact";
    case Variant::PqcFinite: return "pqc_finite";
    case Variant::Nqs: return "nqs";
    case Variant::HpqsExact: return "hpqs_exact";
    case Variant::HpqsFinite: return "hpqs_finite";
  }
  return "?";
}

bool uses_quantum(Variant v) { return v != Variant::Nqs; }
bool uses_classical(Variant v) { return v != Variant::PqcExact && v != Variant::PqcFinite; }
ReadoutMode readout_mode(Variant v) {
  return (v == Variant::PqcExact || v == Variant::HpqsExact) ? ReadoutMode::Exact
                                                             : ReadoutMode::Finite;
}

TaskConfig TaskConfig::defaults(TaskKind task) {
  TaskConfig c;
  c.task = task;
  switch (task) {
    case TaskKind::Qml:
      c.lambda = 0.1;
      c.shot_multiplier = 20.0;
      c.epochs = 5;
      c.learning_rate = 5e-3;
      c.batch_size = 16;
      break;
    case TaskKind::Qt:
      c.lambda = 0.5;
      c.shot_multiplier = 10.0;
      c.epochs = 10;
      c.learning_rate = 3e-3;
      c.batch_size = 32;
      break;
    case TaskKind::QpaGen:
      c.lambda = 0.5;
      c.shot_multiplier = 1.0;
      c.epochs = 20;
      c.learning_rate = 1e-2;
      c.optimizer = OptimizerKind::AdamW;
      c.weight_decay = 1e-2;
      c.batch_size = 32;
      break;
  }
  return c;
}

double TaskConfig::effective_lambda() const {
  if (!uses_classical(variant)) return 1.0;
  if (!uses_quantum(variant)) return 0.0;
  return lambda;
}

// ------------------------------------------------------------ arithmetic

unsigned ceil_log2(std::uint64_t m) {
  if (m == 0) throw std::domain_error("ceil_log2: argument must be positive");
  unsigned bits = 0;
  while ((std::uint64_t{1} << bits) < m) ++bits;
  return bits;
}

int qt_qubit_count(std::size_t m) {
  if (m == 0) throw ConfigError("target network has no parameters");
  return static_cast<int>(std::max(1u, ceil_log2(m)));
}

std::size_t qpa_chunk_count(std::size_t m, std::size_t n_mlp) {
  if (n_mlp == 0) throw ConfigError("qpa: chunk size n_mlp must be positive");
  const std::size_t n_ch = (m + n_mlp - 1) / n_mlp;
  if (n_ch == 0) throw ConfigError("qpa: zero chunks for " + std::to_string(m) + " parameters");
  return n_ch;
}

int qpa_qubit_count(std::size_t m, std::size_t n_mlp) {
  return static_cast<int>(std::max(1u, ceil_log2(qpa_chunk_count(m, n_mlp))));
}

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

// ------------------------------------------------------------ data

QmlData prepare_qml_data(const MnistSplits& mnist, const QmlSettings& s) {
  if (!(s.feature_std > 0)) throw ConfigError("qml: feature_std must be positive");
  auto features = [&](const ImageSet& raw, std::size_t limit, Eigen::MatrixXd& x,
                      std::vector<int>& y) {
    ImageSet set = filter_classes(raw, s.classes);
    if (limit > 0) set = truncate(set, limit);
    set.pixels = (set.pixels.array() - s.feature_mean) / s.feature_std;
    x = avgpool_features(set, s.pool_kernel);
    y = set.labels;
  };
  QmlData d;
  features(mnist.train, s.train_limit, d.train_x, d.train_y);
  features(mnist.test, s.test_limit, d.test_x, d.test_y);
  if (d.train_x.cols() != static_cast<Eigen::Index>(kQmlFeatures))
    throw ConfigError("qml: pooling kernel " + std::to_string(s.pool_kernel) + " yields " +
                      std::to_string(d.train_x.cols()) + " features, the encoder takes 16");
  if (d.train_y.empty() || d.test_y.empty()) throw DataError("qml: no records for the chosen classes");
  return d;
}

namespace {

Tensor images_tensor(const ImageSet& set) {
  Tensor t = Tensor::zeros({set.size(), 1, set.rows, set.cols});
  for (std::size_t i = 0; i < set.size(); ++i)
    t.data().segment(static_cast<Eigen::Index>(i * set.rows * set.cols),
                     static_cast<Eigen::Index>(set.rows * set.cols)) =
        set.pixels.row(static_cast<Eigen::Index>(i)).transpose();
  return t;
}

}  // namespace

QtData prepare_qt_data(const MnistSplits& mnist, const QtSettings& s) {
  const ImageSet train = truncate(mnist.train, s.train_limit);
  const ImageSet test = truncate(mnist.test, s.test_limit);
  return {images_tensor(train), images_tensor(test), train.labels, test.labels};
}

// ------------------------------------------------------------ models

namespace {

NoisePreset checked_noise(const TaskConfig& cfg) {
  cfg.noise.validate();
  if (!cfg.noise.is_ideal() && readout_mode(cfg.variant) == ReadoutMode::Exact)
    throw ConfigError("noise preset '" + cfg.noise.name + "' needs a finite-shot variant, not " +
                      to_string(cfg.variant));
  return cfg.noise;
}

HpqsModel basis_model(const TaskConfig& cfg, std::uint64_t seed, int n, std::size_t d_out,
                      int layers, std::size_t hidden, std::size_t bond_g, std::size_t bond_h,
                      double init_noise, bool passthrough) {
  HpqsModel m;
  m.lambda = cfg.effective_lambda();
  const std::size_t sites = static_cast<std::size_t>(n) + 1;
  if (uses_quantum(cfg.variant)) {
    Rng init = Rng::derive(seed, "init-theta");
    m.quantum.emplace(build_qt_ansatz(n, layers), 0, readout_mode(cfg.variant),
                      cfg.shot_multiplier, checked_noise(cfg), init);
    Rng g_init = Rng::derive(seed, "init-g");
    m.g = MpsPost{std::make_shared<MpsDecoder>(MpsDecoderOptions{sites, bond_g, d_out, init_noise, passthrough},
                                               g_init)};
  }
  if (uses_classical(cfg.variant)) {
    Rng init = Rng::derive(seed, "init-nqs");
    m.classical.emplace(NqsNetwork::bitstring_default(static_cast<std::size_t>(n), init,
                                                      Activation::Sigmoid, hidden));
    Rng h_init = Rng::derive(seed, "init-h");
    m.h = MpsPost{std::make_shared<MpsDecoder>(MpsDecoderOptions{sites, bond_h, d_out, init_noise, passthrough},
                                               h_init)};
  }
  m.validate();
  return m;
}

}  // namespace

HpqsModel build_qml_model(const TaskConfig& cfg, std::uint64_t seed) {
  HpqsModel m;
  m.lambda = cfg.effective_lambda();
  const bool hybrid = uses_quantum(cfg.variant) && uses_classical(cfg.variant);
  if (uses_quantum(cfg.variant)) {
    Rng init = Rng::derive(seed, "init-theta");
    m.quantum.emplace(build_qml_circuit(cfg.qml.layers), kQmlFeatures, readout_mode(cfg.variant),
                      cfg.shot_multiplier, checked_noise(cfg), init);
    m.g = GroupSoftmaxPost::make({{0, 1}, {2, 3}}, hybrid && cfg.qml.group_affine);
  }
  if (uses_classical(cfg.variant)) {
    Rng init = Rng::derive(seed, "init-nqs");
    m.classical.emplace(NqsNetwork::qml_classifier(init, kQmlFeatures));
    m.h = GroupSoftmaxPost::make({{0}, {1}}, false);
  }
  m.validate();
  return m;
}

HpqsModel build_qt_model(const TaskConfig& cfg, std::uint64_t seed) {
  const TargetSpec spec = TargetSpec::by_name(cfg.qt.target);
  const int n = qt_qubit_count(spec.param_count());
  return basis_model(cfg, seed, n, 1, cfg.qt.layers, cfg.qt.nqs_hidden, cfg.qt.bond_g,
                     cfg.qt.bond_h, cfg.qt.decoder_init_noise, cfg.qt.decoder_passthrough);
}

HpqsModel build_qpa_model(const TaskConfig& cfg, std::uint64_t seed) {
  const QpaSettings& s = cfg.qpa;
  const std::size_t m = s.rank * (s.d + s.k);
  const int n = qpa_qubit_count(m, s.n_mlp);
  return basis_model(cfg, seed, n, s.n_mlp, s.layers, s.nqs_hidden, s.bond_g, s.bond_h,
                     s.decoder_init_noise, s.decoder_passthrough);
}

// ------------------------------------------------------------ generation

namespace {

Tensor center_vector(Tape& tape, const Tensor& a) {
  const std::size_t m = a.numel();
  const Tensor mu = ad::reshape(tape, ad::mean(tape, a), {1});
  return ad::reshape(tape, ad::sub(tape, ad::reshape(tape, a, {m, 1}), mu), {m});
}

Tensor generate_rows(Tape& tape, const HpqsModel& model, std::size_t rows,
                     const ReadoutContext& ctx, ReadoutTrace* trace,
                     const std::vector<std::size_t>* order) {
  std::vector<std::size_t> idx(rows);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (order) {
    if (order->size() != rows) throw ShapeError("generation order has the wrong length");
    idx = *order;
  }
  Tensor out = hybrid_predict(tape, model, idx, ctx, trace);
  if (!order) return out;
  // Scatter back to ascending basis order: row i sits at position inv[i].
  const std::size_t width = out.dim(1);
  std::vector<std::size_t> inv(rows);
  for (std::size_t k = 0; k < rows; ++k) inv[idx[k]] = k;
  std::vector<std::size_t> flat_idx;
  flat_idx.reserve(rows * width);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < width; ++j) flat_idx.push_back(inv[i] * width + j);
  Tensor flat = ad::reshape(tape, out, {rows * width});
  return ad::reshape(tape, ad::gather(tape, flat, flat_idx), {rows, width});
}

}  // namespace

Tensor generate_weights(Tape& tape, const HpqsModel& model, std::size_t m, bool center,
                        const ReadoutContext& ctx, ReadoutTrace* trace,
                        const std::vector<std::size_t>* order) {
  Tensor a = ad::reshape(tape, generate_rows(tape, model, m, ctx, trace, order), {m});
  return center ? center_vector(tape, a) : a;
}

LoraFactors generate_lora(Tape& tape, const HpqsModel& model, const QpaSettings& s,
                          const ReadoutContext& ctx, ReadoutTrace* trace,
                          const std::vector<std::size_t>* order) {
  const std::size_t m = s.rank * (s.d + s.k);
  const std::size_t n_ch = qpa_chunk_count(m, s.n_mlp);
  Tensor chunks = generate_rows(tape, model, n_ch, ctx, trace, order);
  if (chunks.dim(1) != s.n_mlp)
    throw ShapeError("qpa: decoder emits " + std::to_string(chunks.dim(1)) +
                     " values per chunk, expected " + std::to_string(s.n_mlp));
  Tensor flat = ad::reshape(tape, chunks, {n_ch * s.n_mlp});
  if (s.center) flat = center_vector(tape, flat);
  return {ad::slice(tape, flat, 0, {s.rank, s.k}), ad::slice(tape, flat, s.rank * s.k, {s.d, s.rank})};
}

// ------------------------------------------------------------ training loops

namespace {

constexpr std::uint64_t kTrainStream = 0;
constexpr std::uint64_t kTestStream = 1;
constexpr std::uint64_t kTrainEvalStream = 2;

Optimizer make_optimizer(const TaskConfig& cfg, const HpqsModel& model) {
  OptimizerOptions o;
  o.kind = cfg.optimizer;
  o.learning_rate = cfg.learning_rate;
  o.weight_decay = cfg.weight_decay;
  return Optimizer(o, registry_trainables(model));
}

Tensor rows_of(const Eigen::MatrixXd& x, std::span<const std::size_t> idx) {
  const std::size_t width = static_cast<std::size_t>(x.cols());
  Tensor t = Tensor::zeros({idx.size(), width});
  for (std::size_t r = 0; r < idx.size(); ++r)
    t.data().segment(static_cast<Eigen::Index>(r * width), static_cast<Eigen::Index>(width)) =
        x.row(static_cast<Eigen::Index>(idx[r])).transpose();
  return t;
}

Tensor samples_of(const Tensor& x, std::span<const std::size_t> idx) {
  Shape shape = x.shape();
  const std::size_t per = x.numel() / shape[0];
  shape[0] = idx.size();
  Tensor t = Tensor::zeros(shape);
  for (std::size_t r = 0; r < idx.size(); ++r)
    t.data().segment(static_cast<Eigen::Index>(r * per), static_cast<Eigen::Index>(per)) =
        x.data().segment(static_cast<Eigen::Index>(idx[r] * per), static_cast<Eigen::Index>(per));
  return t;
}

std::vector<int> labels_of(const std::vector<int>& y, std::span<const std::size_t> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(y[i]);
  return out;
}

std::vector<std::size_t> range(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> v(end - begin);
  std::iota(v.begin(), v.end(), begin);
  return v;
}

Tensor detach(const Tensor& t) { return Tensor::from(t.shape(), t.data()); }

struct Score {
  double loss;
  double accuracy;
};

Score score_probabilities(const Tensor& probs, const std::vector<int>& y) {
  const std::size_t classes = probs.dim(1);
  double nll = 0.0;
  std::size_t correct = 0;
  for (std::size_t b = 0; b < y.size(); ++b) {
    const auto row = probs.data().segment(static_cast<Eigen::Index>(b * classes),
                                          static_cast<Eigen::Index>(classes));
    Eigen::Index best = 0;
    row.maxCoeff(&best);
    if (best == y[b]) ++correct;
    nll -= std::log(std::max(row[y[b]], ad::kLogFloor));
  }
  return {nll / static_cast<double>(y.size()),
          static_cast<double>(correct) / static_cast<double>(y.size())};
}

// Runs `epochs` passes of minibatch training with an evaluation hook before
// the first epoch and after each one.
template <typename StepFn, typename EvalFn>
std::vector<EpochRecord> train_epochs(const TaskConfig& cfg, std::uint64_t seed, std::size_t n,
                                      StepFn step, EvalFn eval, const EpochCallback& on_epoch) {
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (cfg.epochs < 0) throw ConfigError("epochs must be non-negative");
  std::vector<EpochRecord> out;
  EpochRecord first = eval(0);
  first.train_loss = std::numeric_limits<double>::quiet_NaN();
  out.push_back(first);
  if (on_epoch) on_epoch(seed, first);
  std::uint64_t global = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle = Rng::derive(seed, "shuffle", {static_cast<std::uint64_t>(epoch)});
    const auto order = permutation(n, shuffle);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
      const std::size_t end = std::min(n, begin + cfg.batch_size);
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      total += step(idx, global++);
      ++batches;
    }
    EpochRecord rec = eval(epoch);
    rec.train_loss = total / static_cast<double>(std::max<std::size_t>(1, batches));
    out.push_back(rec);
    if (on_epoch) on_epoch(seed, rec);
  }
  return out;
}

// n_qubits: circuit width, or the basis width seen by a classical-only
// bitstring model; zero for a classical-only feature classifier.
SeedResult seed_result(std::uint64_t seed, const HpqsModel& model,
                       std::vector<EpochRecord> epochs, bool basis_wiring) {
  SeedResult r;
  r.seed = seed;
  r.epochs = std::move(epochs);
  r.trainable_count = registry_count(model);
  if (model.quantum) {
    r.n_qubits = static_cast<std::size_t>(model.quantum->n_qubits());
    r.shots_per_evaluation = model.quantum->n_shot();
  } else if (model.classical && basis_wiring) {
    r.n_qubits = model.classical->layout().input_width;
  }
  return r;
}

}  // namespace

SeedResult run_qml(const TaskConfig& cfg, const QmlData& data, std::uint64_t seed,
                   const EpochCallback& on_epoch) {
  HpqsModel model = build_qml_model(cfg, seed);
  Optimizer opt = make_optimizer(cfg, model);

  auto predict_all = [&](const Eigen::MatrixXd& x, std::uint64_t stream, std::uint64_t step) {
    Tape tape;
    const auto idx = range(0, static_cast<std::size_t>(x.rows()));
    return detach(hybrid_expectation_predict(tape, model, rows_of(x, idx),
                                             {seed, stream, step}, nullptr));
  };
  auto eval = [&](int epoch) {
    const auto e = static_cast<std::uint64_t>(epoch);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = score_probabilities(predict_all(data.train_x, kTrainEvalStream, e), data.train_y).loss;
    rec.accuracy = score_probabilities(predict_all(data.test_x, kTestStream, e), data.test_y).accuracy;
    return rec;
  };
  auto step = [&](std::span<const std::size_t> idx, std::uint64_t global) {
    Tape tape;
    ReadoutTrace trace;
    const Tensor probs = hybrid_expectation_predict(tape, model, rows_of(data.train_x, idx),
                                                    {seed, kTrainStream, global}, &trace);
    const Tensor loss = ad::nll_loss(tape, ad::log(tape, probs), labels_of(data.train_y, idx));
    tape.backward(loss);
    finish_backward(model, trace);
    opt.step();
    return loss.item();
  };
  auto epochs = train_epochs(cfg, seed, data.train_y.size(), step, eval, on_epoch);
  return seed_result(seed, model, std::move(epochs), false);
}

SeedResult run_qt(const TaskConfig& cfg, const QtData& data, std::uint64_t seed,
                  const EpochCallback& on_epoch) {
  const TargetSpec spec = TargetSpec::by_name(cfg.qt.target);
  const std::size_t m = spec.param_count();
  HpqsModel model = build_qt_model(cfg, seed);
  Optimizer opt = make_optimizer(cfg, model);
  constexpr std::size_t kEvalChunk = 250;

  auto eval = [&](int epoch) {
    Tape gen;
    const Tensor a = detach(generate_weights(gen, model, m, cfg.qt.center,
                                             {seed, kTestStream, static_cast<std::uint64_t>(epoch)},
                                             nullptr));
    Tape tape;
    const TargetNetwork net = instantiate_target(tape, spec, a);
    auto run = [&](const Tensor& x, const std::vector<int>& y) {
      double nll = 0.0;
      std::size_t correct = 0;
      for (std::size_t begin = 0; begin < y.size(); begin += kEvalChunk) {
        const auto idx = range(begin, std::min(y.size(), begin + kEvalChunk));
        Tape t;
        const Tensor probs = ad::softmax(t, net.forward(t, samples_of(x, idx)));
        const Score s = score_probabilities(probs, labels_of(y, idx));
        nll += s.loss * static_cast<double>(idx.size());
        correct += static_cast<std::size_t>(std::lround(s.accuracy * static_cast<double>(idx.size())));
      }
      return Score{nll / static_cast<double>(y.size()),
                   static_cast<double>(correct) / static_cast<double>(y.size())};
    };
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = run(data.train_x, data.train_y).loss;
    rec.accuracy = run(data.test_x, data.test_y).accuracy;
    return rec;
  };
  auto step = [&](std::span<const std::size_t> idx, std::uint64_t global) {
    Tape tape;
    ReadoutTrace trace;
    const Tensor a = generate_weights(tape, model, m, cfg.qt.center, {seed, kTrainStream, global},
                                      &trace);
    const TargetNetwork net = instantiate_target(tape, spec, a);
    const Tensor logits = net.forward(tape, samples_of(data.train_x, idx));
    const Tensor loss =
        ad::nll_loss(tape, ad::log(tape, ad::softmax(tape, logits)), labels_of(data.train_y, idx));
    tape.backward(loss);
    finish_backward(model, trace);
    opt.step();
    return loss.item();
  };
  auto epochs = train_epochs(cfg, seed, data.train_y.size(), step, eval, on_epoch);
  return seed_result(seed, model, std::move(epochs), true);
}

namespace {

struct QpaProblem {
  Tensor x;     // [samples, k]
  Tensor base;  // x W0^T, [samples, d]
  Tensor y;     // x (W0 + B* A*)^T
};

QpaProblem make_qpa_problem(const QpaSettings& s) {
  Rng rng = Rng::derive(s.data_seed, "qpa-data");
  const auto d = static_cast<Eigen::Index>(s.d), k = static_cast<Eigen::Index>(s.k),
             r = static_cast<Eigen::Index>(s.rank), n = static_cast<Eigen::Index>(s.samples);
  auto fill = [&](Eigen::Index rows, Eigen::Index cols, double half) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-half, half);
    return m;
  };
  const Eigen::MatrixXd w0 = fill(d, k, 1.0 / std::sqrt(static_cast<double>(k)));
  const Eigen::MatrixXd b_star = fill(d, r, 0.5), a_star = fill(r, k, 0.5);
  const Eigen::MatrixXd x = fill(n, k, 1.0);
  const Eigen::MatrixXd base = x * w0.transpose();
  const Eigen::MatrixXd y = x * (w0 + b_star * a_star / static_cast<double>(s.rank)).transpose();
  auto to_tensor = [](const Eigen::MatrixXd& m) {
    Tensor t = Tensor::zeros({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) t.data()[i * m.cols() + j] = m(i, j);
    return t;
  };
  return {to_tensor(x), to_tensor(base), to_tensor(y)};
}

Tensor qpa_forward(Tape& tape, const LoraFactors& f, const Tensor& x, const Tensor& base,
                   double scale) {
  const Tensor xa = ad::matmul(tape, x, ad::transpose(tape, f.a));
  const Tensor delta = ad::matmul(tape, xa, ad::transpose(tape, f.b));
  return ad::add(tape, base, ad::scale(tape, delta, scale));
}

}  // namespace

SeedResult run_qpa_gen(const TaskConfig& cfg, std::uint64_t seed, const EpochCallback& on_epoch) {
  const QpaSettings& s = cfg.qpa;
  if (s.rank == 0 || s.d == 0 || s.k == 0 || s.samples == 0)
    throw ConfigError("qpa: d, k, rank and samples must be positive");
  const QpaProblem problem = make_qpa_problem(s);
  HpqsModel model = build_qpa_model(cfg, seed);
  Optimizer opt = make_optimizer(cfg, model);
  const double scale = s.alpha / static_cast<double>(s.rank);

  auto eval = [&](int epoch) {
    Tape tape;
    const LoraFactors f =
        generate_lora(tape, model, s, {seed, kTestStream, static_cast<std::uint64_t>(epoch)}, nullptr);
    const LoraFactors fixed{detach(f.a), detach(f.b)};
    Tape t;
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = ad::mse_loss(t, qpa_forward(t, fixed, problem.x, problem.base, scale), problem.y).item();
    return rec;
  };
  auto step = [&](std::span<const std::size_t> idx, std::uint64_t global) {
    Tape tape;
    ReadoutTrace trace;
    const LoraFactors f = generate_lora(tape, model, s, {seed, kTrainStream, global}, &trace);
    const Tensor pred = qpa_forward(tape, f, samples_of(problem.x, idx), samples_of(problem.base, idx), scale);
    const Tensor loss = ad::mse_loss(tape, pred, samples_of(problem.y, idx));
    tape.backward(loss);
    finish_backward(model, trace);
    opt.step();
    return loss.item();
  };
  auto epochs = train_epochs(cfg, seed, s.samples, step, eval, on_epoch);
  return seed_result(seed, model, std::move(epochs), true);
}

SeedResult run_task_seed(const TaskConfig& cfg, std::uint64_t seed, const EpochCallback& on_epoch) {
  const auto root = cfg.data_root.empty() ? default_data_root() : cfg.data_root;
  switch (cfg.task) {
    case TaskKind::Qml: return run_qml(cfg, prepare_qml_data(load_mnist(root), cfg.qml), seed, on_epoch);
    case TaskKind::Qt: return run_qt(cfg, prepare_qt_data(load_mnist(root), cfg.qt), seed, on_epoch);
    case TaskKind::QpaGen: return run_qpa_gen(cfg, seed, on_epoch);
  }
  throw ConfigError("unknown task");
}

}  // namespace hpqs
