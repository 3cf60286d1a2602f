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

#include "hpqs/rng.hpp"
#include "hpqs/tensor.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace hpqs {

/// Local embedding x -> (x, 1 - x). Inputs within 1e-9 of [0, 1] are
/// clamped; anything further out throws std::domain_error.
std::array<double, 2> feature_map(double x);

struct MpsDecoderOptions {
  std::size_t n_sites = 2;
  std::size_t bond = 1;
  std::size_t d_out = 1;
  /// Half-width of the uniform perturbation added to the identity channels.
  double init_noise = 1e-2;
  /// When set, the last site starts as (1, 0) on its physical leg so the
  /// initial output tracks the value fed to that site instead of being
  /// constant.
  bool value_passthrough = false;
};

/// Open-boundary matrix product state mapping n_sites inputs in [0, 1] to a
/// vector of d_out outputs.
///
/// Core j has shape [Dl, 2, Dr] with Dl = 1 at the left end and Dr = 1 at the
/// right end. The output core (site ceil(n_sites / 2) - 1, zero based)
/// carries an extra trailing leg: [Dl, 2, Dr, d_out]. Bit sites come first
/// and the branch value sits on the last site.
class MpsDecoder {
 public:
  MpsDecoder(const MpsDecoderOptions& options, Rng& init);
  /// Adopts explicit cores; shapes are validated against the layout above
  /// with the output leg on `output_site`.
  MpsDecoder(std::vector<Tensor> cores, std::size_t output_site);

  std::size_t n_sites() const { return cores_.size(); }
  std::size_t bond() const { return bond_; }
  std::size_t d_out() const { return d_out_; }
  std::size_t output_site() const { return output_site_; }
  const std::vector<Tensor>& cores() const { return cores_; }
  std::size_t param_count() const;

  /// Batched contraction recorded on the tape: inputs [B, n_sites] -> [B, d_out].
  /// Gradients reach every core and the inputs.
  Tensor forward(Tape& tape, const Tensor& inputs) const;

  /// Contraction of one input row without a tape.
  Eigen::VectorXd contract(std::span<const double> inputs) const;
  /// Contraction with raw per-site feature vectors (not necessarily from
  /// feature_map). Output is multilinear in the feature vectors.
  Eigen::VectorXd contract_features(std::span<const std::array<double, 2>> features) const;

 private:
  void validate() const;

  std::vector<Tensor> cores_;
  std::size_t output_site_ = 0;
  std::size_t bond_ = 1;
  std::size_t d_out_ = 1;
};

/// Default output site for a chain of `n_sites`: ceil(n_sites / 2) - 1.
std::size_t mps_output_site(std::size_t n_sites);

/// Trainable scalars of a default-layout decoder:
/// sum over sites of Dl * 2 * Dr, times d_out on the output core.
std::size_t decoder_param_count(std::size_t n_sites, std::size_t bond, std::size_t d_out);

}  // namespace hpqs
