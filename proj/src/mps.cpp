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

#include "hpqs/mps.hpp"

#include "hpqs/error.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hpqs {

namespace {

constexpr double kClampTolerance = 1e-9;

struct CoreDims {
  std::size_t left, right, out;
};

CoreDims dims_of(const Tensor& core, bool is_output) {
  return CoreDims{core.dim(0), core.dim(2), is_output ? core.dim(3) : 1};
}

// Sum_s xi_s * core[:, s, :, k] as a dense Dl x Dr matrix.
Eigen::MatrixXd site_matrix(const Tensor& core, const CoreDims& d, const std::array<double, 2>& xi,
                            std::size_t k) {
  Eigen::MatrixXd m(d.left, d.right);
  const double* a = core.data().data();
  for (std::size_t al = 0; al < d.left; ++al)
    for (std::size_t be = 0; be < d.right; ++be)
      m(al, be) = xi[0] * a[((al * 2 + 0) * d.right + be) * d.out + k] +
                  xi[1] * a[((al * 2 + 1) * d.right + be) * d.out + k];
  return m;
}

}  // namespace

std::array<double, 2> feature_map(double x) {
  if (!(x >= -kClampTolerance && x <= 1.0 + kClampTolerance))
    throw std::domain_error("feature_map: input " + std::to_string(x) + " outside [0, 1]");
  x = std::clamp(x, 0.0, 1.0);
  return {x, 1.0 - x};
}

std::size_t mps_output_site(std::size_t n_sites) { return (n_sites + 1) / 2 - 1; }

std::size_t decoder_param_count(std::size_t n_sites, std::size_t bond, std::size_t d_out) {
  if (n_sites == 0 || bond == 0 || d_out == 0) return 0;
  const std::size_t out_site = mps_output_site(n_sites);
  std::size_t total = 0;
  for (std::size_t j = 0; j < n_sites; ++j) {
    const std::size_t left = j == 0 ? 1 : bond;
    const std::size_t right = j + 1 == n_sites ? 1 : bond;
    total += left * 2 * right * (j == out_site ? d_out : 1);
  }
  return total;
}

MpsDecoder::MpsDecoder(const MpsDecoderOptions& options, Rng& init)
    : output_site_(mps_output_site(options.n_sites)), bond_(options.bond), d_out_(options.d_out) {
  if (options.n_sites == 0 || options.bond == 0 || options.d_out == 0)
    throw ShapeError("mps: n_sites, bond and d_out must all be positive");
  const std::size_t n = options.n_sites;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t left = j == 0 ? 1 : bond_;
    const std::size_t right = j + 1 == n ? 1 : bond_;
    const bool is_out = j == output_site_;
    const bool pass = options.value_passthrough && j + 1 == n;
    Shape shape{left, 2, right};
    if (is_out) shape.push_back(d_out_);
    Tensor core = Tensor::zeros(shape, true);
    const std::size_t out = is_out ? d_out_ : 1;
    double* a = core.data().data();
    for (std::size_t al = 0; al < left; ++al)
      for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t be = 0; be < right; ++be)
          for (std::size_t k = 0; k < out; ++k) {
            // Identity channel; the boundary vectors select bond 0.
            const double base = al == be && !(pass && s == 1) ? 1.0 : 0.0;
            a[((al * 2 + s) * right + be) * out + k] =
                base + init.uniform(-options.init_noise, options.init_noise);
          }
    cores_.push_back(core);
  }
  validate();
}

MpsDecoder::MpsDecoder(std::vector<Tensor> cores, std::size_t output_site)
    : cores_(std::move(cores)), output_site_(output_site) {
  if (cores_.empty()) throw ShapeError("mps: no cores");
  if (output_site_ >= cores_.size())
    throw ShapeError("mps: output site " + std::to_string(output_site_) + " outside chain of " +
                     std::to_string(cores_.size()));
  const Tensor& oc = cores_[output_site_];
  if (oc.rank() != 4) throw ShapeError("mps: output core at site " + std::to_string(output_site_) +
                                       " must have rank 4, got " + shape_string(oc.shape()));
  d_out_ = oc.dim(3);
  bond_ = 1;
  for (const auto& c : cores_)
    if (c.rank() >= 3) bond_ = std::max({bond_, c.dim(0), c.dim(2)});
  validate();
}

void MpsDecoder::validate() const {
  for (std::size_t j = 0; j < cores_.size(); ++j) {
    const Tensor& c = cores_[j];
    const std::size_t want_rank = j == output_site_ ? 4 : 3;
    if (c.rank() != want_rank || c.dim(1) != 2)
      throw ShapeError("mps: core at site " + std::to_string(j) + " has shape " +
                       shape_string(c.shape()) + ", expected rank " + std::to_string(want_rank) +
                       " with physical extent 2");
    if (j == 0 && c.dim(0) != 1)
      throw ShapeError("mps: left boundary core at site 0 has left bond " + std::to_string(c.dim(0)));
    if (j + 1 == cores_.size() && c.dim(2) != 1)
      throw ShapeError("mps: right boundary core at site " + std::to_string(j) +
                       " has right bond " + std::to_string(c.dim(2)));
    if (j > 0 && cores_[j - 1].dim(2) != c.dim(0))
      throw ShapeError("mps: bond mismatch between site " + std::to_string(j - 1) + " (" +
                       std::to_string(cores_[j - 1].dim(2)) + ") and site " + std::to_string(j) +
                       " (" + std::to_string(c.dim(0)) + ")");
  }
}

std::size_t MpsDecoder::param_count() const {
  std::size_t n = 0;
  for (const auto& c : cores_) n += c.numel();
  return n;
}

Eigen::VectorXd MpsDecoder::contract_features(std::span<const std::array<double, 2>> xi) const {
  if (xi.size() != cores_.size())
    throw ShapeError("mps: " + std::to_string(xi.size()) + " inputs for " +
                     std::to_string(cores_.size()) + " sites");
  Eigen::RowVectorXd left = Eigen::RowVectorXd::Ones(1);
  for (std::size_t j = 0; j < output_site_; ++j)
    left = left * site_matrix(cores_[j], dims_of(cores_[j], false), xi[j], 0);
  Eigen::VectorXd right = Eigen::VectorXd::Ones(1);
  for (std::size_t j = cores_.size() - 1; j > output_site_; --j)
    right = site_matrix(cores_[j], dims_of(cores_[j], false), xi[j], 0) * right;
  const Tensor& oc = cores_[output_site_];
  const CoreDims od = dims_of(oc, true);
  Eigen::VectorXd out(d_out_);
  for (std::size_t k = 0; k < d_out_; ++k)
    out[k] = left * site_matrix(oc, od, xi[output_site_], k) * right;
  return out;
}

Eigen::VectorXd MpsDecoder::contract(std::span<const double> inputs) const {
  std::vector<std::array<double, 2>> xi;
  xi.reserve(inputs.size());
  for (double x : inputs) xi.push_back(feature_map(x));
  return contract_features(xi);
}

Tensor MpsDecoder::forward(Tape& tape, const Tensor& inputs) const {
  if (inputs.rank() != 2 || inputs.dim(1) != cores_.size())
    throw ShapeError("mps: inputs " + shape_string(inputs.shape()) + " do not match " +
                     std::to_string(cores_.size()) + " sites");
  const std::size_t batch = inputs.dim(0);
  const std::size_t n = cores_.size();
  std::vector<std::array<double, 2>> xi(batch * n);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t j = 0; j < n; ++j) xi[b * n + j] = feature_map(inputs[b * n + j]);

  Tensor out = Tensor::zeros({batch, d_out_});
  for (std::size_t b = 0; b < batch; ++b) {
    const Eigen::VectorXd v = contract_features(std::span(xi).subspan(b * n, n));
    out.data().segment(static_cast<Eigen::Index>(b * d_out_), static_cast<Eigen::Index>(d_out_)) = v;
  }
  require_finite("mps_contract", out);

  std::vector<Tensor> tape_inputs = cores_;
  tape_inputs.push_back(inputs);
  const std::vector<Tensor> cores = cores_;
  const std::size_t o = output_site_, d_out = d_out_;
  tape.record("mps_contract", tape_inputs, out,
              [cores, inputs, out, xi, batch, n, o, d_out]() mutable {
    const Tensor& oc = cores[o];
    const CoreDims od = dims_of(oc, true);
    for (std::size_t b = 0; b < batch; ++b) {
      const auto g = out.grad().segment(static_cast<Eigen::Index>(b * d_out),
                                        static_cast<Eigen::Index>(d_out));
      if (g.isZero(0.0)) continue;
      const std::array<double, 2>* x = &xi[b * n];
      // Chain with the output core collapsed against the upstream gradient.
      std::vector<Eigen::MatrixXd> m(n);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == o) {
          m[j] = Eigen::MatrixXd::Zero(od.left, od.right);
          for (std::size_t k = 0; k < d_out; ++k)
            if (g[k] != 0.0) m[j] += g[k] * site_matrix(oc, od, x[j], k);
        } else {
          m[j] = site_matrix(cores[j], dims_of(cores[j], false), x[j], 0);
        }
      }
      std::vector<Eigen::RowVectorXd> prefix(n);
      prefix[0] = Eigen::RowVectorXd::Ones(1);
      for (std::size_t j = 1; j < n; ++j) prefix[j] = prefix[j - 1] * m[j - 1];
      std::vector<Eigen::VectorXd> suffix(n);
      suffix[n - 1] = Eigen::VectorXd::Ones(1);
      for (std::size_t j = n - 1; j > 0; --j) suffix[j - 1] = m[j] * suffix[j];

      for (std::size_t j = 0; j < n; ++j) {
        Tensor core = cores[j];
        const bool is_out = j == o;
        const CoreDims d = dims_of(core, is_out);
        const Eigen::MatrixXd outer = prefix[j].transpose() * suffix[j].transpose();
        const double* a = core.data().data();
        double* ga = core.requires_grad() ? core.grad().data() : nullptr;
        std::array<double, 2> dxi{};
        for (std::size_t al = 0; al < d.left; ++al)
          for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t be = 0; be < d.right; ++be) {
              const double pr = outer(al, be);
              const std::size_t base = ((al * 2 + s) * d.right + be) * d.out;
              if (is_out) {
                for (std::size_t k = 0; k < d_out; ++k) {
                  if (ga) ga[base + k] += g[k] * x[j][s] * pr;
                  dxi[s] += g[k] * a[base + k] * pr;
                }
              } else {
                if (ga) ga[base] += x[j][s] * pr;
                dxi[s] += a[base] * pr;
              }
            }
        if (inputs.requires_grad()) inputs.grad()[b * n + j] += dxi[0] - dxi[1];
      }
    }
  });
  return out;
}

}  // namespace hpqs
