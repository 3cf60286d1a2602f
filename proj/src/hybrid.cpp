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

#include "hpqs/hybrid.hpp"

#include "hpqs/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hpqs {

// ------------------------------------------------------------ postprocessors

AffinePost AffinePost::make(double scale, double shift, bool trainable) {
  return AffinePost{Tensor::full({1}, scale, trainable), Tensor::full({1}, shift, trainable)};
}

GroupSoftmaxPost GroupSoftmaxPost::make(std::vector<std::vector<int>> groups, bool affine) {
  if (groups.empty()) throw ConfigError("group softmax: no groups");
  GroupSoftmaxPost post{std::move(groups), Tensor(), Tensor()};
  if (affine) {
    post.scale = Tensor::full({post.groups.size()}, 1.0, true);
    post.shift = Tensor::full({post.groups.size()}, 0.0, true);
  }
  return post;
}

std::string postprocessor_kind(const Postprocessor& post) {
  struct Visitor {
    std::string operator()(const IdentityPost&) const { return "identity"; }
    std::string operator()(const AffinePost&) const { return "affine"; }
    std::string operator()(const GroupSoftmaxPost&) const { return "group_softmax"; }
    std::string operator()(const MpsPost&) const { return "mps"; }
  };
  return std::visit(Visitor{}, post);
}

namespace {

Tensor apply_affine(Tape& tape, const AffinePost& a, const Tensor& x) {
  const Shape shape = x.shape();
  Tensor col = ad::reshape(tape, x, {x.numel(), 1});
  col = ad::add(tape, ad::mul(tape, col, a.scale), a.shift);
  return ad::reshape(tape, col, shape);
}

Tensor apply_group_softmax(Tape& tape, const GroupSoftmaxPost& g, const Tensor& x) {
  if (x.rank() != 2)
    throw ShapeError("group softmax: expected [B, n] input, got " + shape_string(x.shape()));
  const std::size_t n = x.dim(1), groups = g.groups.size();
  Tensor indicator = Tensor::zeros({n, groups});
  for (std::size_t k = 0; k < groups; ++k)
    for (int q : g.groups[k]) {
      if (q < 0 || static_cast<std::size_t>(q) >= n)
        throw ShapeError("group softmax: index " + std::to_string(q) + " outside input width " +
                         std::to_string(n));
      indicator.data()[static_cast<Eigen::Index>(static_cast<std::size_t>(q) * groups + k)] = 1.0;
    }
  Tensor logits = ad::matmul(tape, x, indicator);
  if (g.scale.defined()) logits = ad::add(tape, ad::mul(tape, logits, g.scale), g.shift);
  return ad::softmax(tape, logits);
}

}  // namespace

Tensor apply_postprocessor(Tape& tape, const Postprocessor& post, const Tensor& input) {
  struct Visitor {
    Tape& tape;
    const Tensor& x;
    Tensor operator()(const IdentityPost&) const { return x; }
    Tensor operator()(const AffinePost& a) const { return apply_affine(tape, a, x); }
    Tensor operator()(const GroupSoftmaxPost& g) const { return apply_group_softmax(tape, g, x); }
    Tensor operator()(const MpsPost& m) const {
      if (!m.decoder) throw ConfigError("mps postprocessor without a decoder");
      return m.decoder->forward(tape, x);
    }
  };
  return std::visit(Visitor{tape, input}, post);
}

std::vector<Tensor> postprocessor_parameters(const Postprocessor& post) {
  struct Visitor {
    std::vector<Tensor> operator()(const IdentityPost&) const { return {}; }
    std::vector<Tensor> operator()(const AffinePost& a) const {
      std::vector<Tensor> out;
      if (a.scale.requires_grad()) out.push_back(a.scale);
      if (a.shift.requires_grad()) out.push_back(a.shift);
      return out;
    }
    std::vector<Tensor> operator()(const GroupSoftmaxPost& g) const {
      if (!g.scale.defined()) return {};
      return {g.scale, g.shift};
    }
    std::vector<Tensor> operator()(const MpsPost& m) const {
      return m.decoder ? m.decoder->cores() : std::vector<Tensor>{};
    }
  };
  return std::visit(Visitor{}, post);
}

// ------------------------------------------------------------ quantum branch

ReadoutMode parse_readout_mode(const std::string& name) {
  if (name == "exact") return ReadoutMode::Exact;
  if (name == "finite") return ReadoutMode::Finite;
  throw ConfigError("unknown readout mode '" + name + "' (expected exact or finite)");
}

std::string to_string(ReadoutMode mode) { return mode == ReadoutMode::Exact ? "exact" : "finite"; }

QuantumBranch::QuantumBranch(Circuit circuit, std::size_t prefix_width, ReadoutMode mode,
                             double shot_multiplier, NoisePreset noise, Rng& init,
                             double init_range)
    : circuit_(std::move(circuit)),
      prefix_width_(prefix_width),
      mode_(mode),
      shot_multiplier_(shot_multiplier),
      noise_(std::move(noise)) {
  noise_.validate();
  if (prefix_width_ > circuit_.n_slots())
    throw ShapeError("quantum branch: prefix width " + std::to_string(prefix_width_) +
                     " exceeds " + std::to_string(circuit_.n_slots()) + " circuit slots");
  if (mode_ == ReadoutMode::Exact && !noise_.is_ideal())
    throw ConfigError("quantum branch: exact readout cannot apply noise preset '" + noise_.name +
                      "'");
  if (mode_ == ReadoutMode::Finite) (void)n_shot();
  const std::size_t n_theta = circuit_.n_slots() - prefix_width_;
  theta_ = Tensor::zeros({n_theta}, true);
  for (std::size_t j = 0; j < n_theta; ++j)
    theta_.data()[static_cast<Eigen::Index>(j)] = init.uniform(-init_range, init_range);
}

std::uint64_t QuantumBranch::n_shot() const {
  if (mode_ == ReadoutMode::Exact) return 0;
  return ShotBudget{shot_multiplier_, circuit_.n_qubits()}.n_shot();
}

Eigen::VectorXd QuantumBranch::evaluate(std::span<const double> params, Rng& noise_rng,
                                        Rng& shot_rng) const {
  Eigen::VectorXd probs;
  if (noise_.is_ideal())
    probs = simulate<double>(circuit_, params).probabilities();
  else
    probs = apply_noise_trajectory(circuit_, params, noise_, noise_rng).state.probabilities();
  if (mode_ == ReadoutMode::Exact) return probs;
  return sample_shots(probs, circuit_.n_qubits(), n_shot(), shot_rng, noise_.p_ro).probabilities();
}

namespace {

std::vector<double> full_params(const std::vector<double>& prefix, const Tensor& theta,
                                std::size_t prefix_width) {
  if (prefix.size() != prefix_width)
    throw ShapeError("quantum branch: prefix of length " + std::to_string(prefix.size()) +
                     ", expected " + std::to_string(prefix_width));
  std::vector<double> params(prefix);
  params.insert(params.end(), theta.data().data(), theta.data().data() + theta.numel());
  return params;
}

}  // namespace

Tensor QuantumBranch::readout(const std::vector<std::vector<double>>& prefixes,
                              const ReadoutContext& ctx, ReadoutTrace* trace) const {
  const std::size_t rows = prefixes.size();
  const std::size_t dim = std::size_t{1} << circuit_.n_qubits();
  if (rows == 0) throw ShapeError("quantum branch: readout over zero rows");
  Tensor probs = Tensor::zeros({rows, dim});
  for (std::size_t r = 0; r < rows; ++r) {
    const auto params = full_params(prefixes[r], theta_, prefix_width_);
    Rng noise_rng = Rng::derive(ctx.seed, "noise", {ctx.stream, ctx.step, r});
    Rng shot_rng = Rng::derive(ctx.seed, "shots", {ctx.stream, ctx.step, r});
    probs.data().segment(static_cast<Eigen::Index>(r * dim), static_cast<Eigen::Index>(dim)) =
        evaluate(params, noise_rng, shot_rng);
  }
  require_finite("quantum_readout", probs);
  probs.set_requires_grad(theta_.requires_grad());
  if (trace) *trace = ReadoutTrace{ctx, prefixes, probs};
  return probs;
}

void QuantumBranch::backprop_theta(const ReadoutTrace& trace) const {
  Eigen::VectorXd& grad = theta_.grad();
  if (!trace.probs.defined() || !trace.probs.has_grad()) return;
  const std::size_t dim = std::size_t{1} << circuit_.n_qubits();
  const std::size_t n_theta = theta_.numel();
  std::vector<std::size_t> slots(n_theta);
  for (std::size_t j = 0; j < n_theta; ++j) slots[j] = prefix_width_ + j;
  const ReadoutContext& ctx = trace.ctx;
  for (std::size_t r = 0; r < trace.prefixes.size(); ++r) {
    const Eigen::VectorXd w =
        trace.probs.grad().segment(static_cast<Eigen::Index>(r * dim), static_cast<Eigen::Index>(dim));
    if (w.isZero(0.0)) continue;
    const auto params = full_params(trace.prefixes[r], theta_, prefix_width_);
    const Eigen::VectorXd g =
        parameter_shift(params, slots, [&](std::span<const double> p, const ShiftKey& key) {
          const std::uint64_t sign = key.sign > 0 ? 1 : 0;
          Rng noise_rng = Rng::derive(ctx.seed, "shift-noise", {ctx.stream, ctx.step, r, key.slot, sign});
          Rng shot_rng = Rng::derive(ctx.seed, "shift-shots", {ctx.stream, ctx.step, r, key.slot, sign});
          return w.dot(evaluate(p, noise_rng, shot_rng));
        });
    grad += g;
  }
  if (!grad.allFinite()) throw NumericError("parameter shift: non-finite theta gradient");
}

// ------------------------------------------------------------------ model

void HpqsModel::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ConfigError("hpqs: lambda " + std::to_string(lambda) + " outside [0, 1]");
  if (!quantum && lambda != 0.0) throw ConfigError("hpqs: lambda > 0 requires a quantum branch");
  if (!classical && lambda != 1.0)
    throw ConfigError("hpqs: lambda < 1 requires a classical branch");
}

std::vector<Tensor> registry_trainables(const HpqsModel& model) {
  std::vector<Tensor> out;
  if (model.quantum) out.push_back(model.quantum->theta());
  if (model.classical)
    for (const auto& p : model.classical->parameters()) out.push_back(p);
  for (const auto& p : postprocessor_parameters(model.g)) out.push_back(p);
  for (const auto& p : postprocessor_parameters(model.h)) out.push_back(p);
  return out;
}

std::size_t registry_count(const HpqsModel& model) {
  std::size_t n = 0;
  for (const auto& p : registry_trainables(model)) n += p.numel();
  return n;
}

Tensor blend(Tape& tape, double lambda, const Tensor& q, const Tensor& c) {
  if (q.shape() != c.shape())
    throw ShapeError("blend: quantum branch " + shape_string(q.shape()) +
                     " vs classical branch " + shape_string(c.shape()));
  return ad::add(tape, ad::scale(tape, q, lambda), ad::scale(tape, c, 1.0 - lambda));
}

namespace {

Tensor combine(Tape& tape, const HpqsModel& model, const std::optional<Tensor>& q,
               const std::optional<Tensor>& c) {
  if (q && c) return blend(tape, model.lambda, *q, *c);
  return q ? *q : *c;
}

int basis_width(const HpqsModel& model) {
  if (model.quantum) return model.quantum->n_qubits();
  return static_cast<int>(model.classical->layout().input_width);
}

}  // namespace

Tensor hybrid_predict(Tape& tape, const HpqsModel& model, std::span<const std::size_t> indices,
                      const ReadoutContext& ctx, ReadoutTrace* trace) {
  model.validate();
  const int n = basis_width(model);
  const std::size_t rows = indices.size();
  const std::size_t dim = std::size_t{1} << n;
  for (std::size_t i : indices)
    if (i >= dim)
      throw ShapeError("hybrid_predict: basis index " + std::to_string(i) + " outside 2^" +
                       std::to_string(n));
  const Tensor bits = basis_bits(n, indices);

  // MPS decoders see (bits, value); the scalar postprocessors see the value.
  auto route = [&](const Postprocessor& post, const Tensor& value) {
    if (std::holds_alternative<MpsPost>(post))
      return apply_postprocessor(tape, post, ad::concat(tape, {bits, value}, 1));
    return apply_postprocessor(tape, post, value);
  };

  std::optional<Tensor> q, c;
  if (model.quantum) {
    if (model.quantum->prefix_width() != 0)
      throw ConfigError("hybrid_predict: basis wiring needs a circuit without data slots");
    const Tensor probs = model.quantum->readout({{}}, ctx, trace);
    const Tensor flat = ad::reshape(tape, probs, {dim});
    const Tensor picked = ad::gather(tape, flat, indices);
    q = route(model.g, ad::reshape(tape, picked, {rows, 1}));
  }
  if (model.classical) {
    if (model.classical->layout().input_width != static_cast<std::size_t>(n))
      throw ShapeError("hybrid_predict: classical input width " +
                       std::to_string(model.classical->layout().input_width) + " vs " +
                       std::to_string(n) + " qubits");
    c = route(model.h, model.classical->forward(tape, bits));
  }
  return combine(tape, model, q, c);
}

Tensor hybrid_expectation_predict(Tape& tape, const HpqsModel& model, const Tensor& features,
                                  const ReadoutContext& ctx, ReadoutTrace* trace) {
  model.validate();
  if (features.rank() != 2)
    throw ShapeError("hybrid_expectation_predict: features must be [B, F], got " +
                     shape_string(features.shape()));
  const std::size_t batch = features.dim(0), width = features.dim(1);
  std::optional<Tensor> q, c;
  if (model.quantum) {
    const QuantumBranch& qb = *model.quantum;
    if (qb.prefix_width() != width)
      throw ShapeError("hybrid_expectation_predict: " + std::to_string(width) +
                       " features for an encoder with " + std::to_string(qb.prefix_width()) +
                       " slots");
    std::vector<std::vector<double>> prefixes(batch);
    for (std::size_t b = 0; b < batch; ++b)
      prefixes[b].assign(features.data().data() + b * width,
                         features.data().data() + (b + 1) * width);
    const Tensor probs = qb.readout(prefixes, ctx, trace);
    const Eigen::MatrixXd table = z_table(qb.n_qubits());
    Tensor z_map = Tensor::zeros({static_cast<std::size_t>(table.rows()),
                                  static_cast<std::size_t>(table.cols())});
    for (Eigen::Index i = 0; i < table.rows(); ++i)
      for (Eigen::Index k = 0; k < table.cols(); ++k)
        z_map.data()[i * table.cols() + k] = table(i, k);
    q = apply_postprocessor(tape, model.g, ad::matmul(tape, probs, z_map));
  }
  if (model.classical)
    c = apply_postprocessor(tape, model.h, nqs_classifier_forward(tape, *model.classical, features));
  return combine(tape, model, q, c);
}

void finish_backward(const HpqsModel& model, const ReadoutTrace& trace) {
  if (model.quantum) model.quantum->backprop_theta(trace);
}

}  // namespace hpqs
