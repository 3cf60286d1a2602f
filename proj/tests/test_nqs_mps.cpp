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

#include "gradcheck.hpp"

#include "hpqs/error.hpp"
#include "hpqs/mps.hpp"
#include "hpqs/nqs.hpp"

#include <gtest/gtest.h>

#include <array>
#include <vector>

namespace hpqs {
namespace {

using testing::max_gradient_error;

// --------------------------------------------------------------------- nqs

TEST(Nqs, ZeroNetworkOutputsZero) {
  Rng rng(1);
  NqsNetwork net = NqsNetwork::bitstring_default(4, rng);
  net.zero_parameters();
  Tape tape;
  for (std::vector<int> bits : {std::vector<int>{0, 0, 0, 0}, {1, 0, 1, 1}}) {
    EXPECT_EQ(nqs_forward(tape, net, bits).item(), 0.0);
  }
}

TEST(Nqs, QtLayoutCount) {
  Rng rng(1);
  for (std::size_t n : {4u, 10u, 13u}) {
    const NqsNetwork net = NqsNetwork::bitstring_default(n, rng);
    EXPECT_EQ(net.param_count(), 32 * n + 32 + 32 + 1);
    EXPECT_EQ(dense_param_count(net.layout()), net.param_count());
  }
}

TEST(Nqs, SingleLinearLayer) {
  Rng rng(1);
  NqsNetwork net({2, {}, Activation::ReLU, 1, Activation::None}, rng);
  auto params = net.parameters();
  params[0].data() << 1.0, 1.0;
  params[1].data()[0] = 0.0;
  Tape tape;
  const std::vector<int> bits{1, 0};
  EXPECT_EQ(nqs_forward(tape, net, bits).item(), 1.0);
}

TEST(Nqs, BitstringValidation) {
  Rng rng(1);
  const NqsNetwork net = NqsNetwork::bitstring_default(3, rng);
  Tape tape;
  EXPECT_THROW(nqs_forward(tape, net, std::vector<int>{0, 1}), ShapeError);
  EXPECT_THROW(nqs_forward(tape, net, std::vector<int>{0, 2, 1}), ShapeError);
}

TEST(Nqs, ConstantNetworkGivesUniform) {
  Rng rng(1);
  NqsNetwork net = NqsNetwork::bitstring_default(5, rng);
  net.zero_parameters();
  Tape tape;
  const Tensor p = nqs_distribution(tape, net, 5);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(p[i], 1.0 / 32, 1e-15);
}

TEST(Nqs, DistributionNormalizedAndPositive) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng = Rng::derive(s, "nqs-dist");
    const NqsNetwork net = NqsNetwork::bitstring_default(6, rng);
    Tape tape;
    const Tensor p = nqs_distribution(tape, net, 6);
    EXPECT_NEAR(p.data().sum(), 1.0, 1e-12);
    EXPECT_GT(p.data().minCoeff(), 0.0);
  }
}

TEST(Nqs, TwoStateDefinition) {
  Tape tape;
  const Tensor raw = Tensor::from({2}, std::vector<double>{0.3, 1.7});
  const Tensor p = normalize(tape, raw);
  EXPECT_DOUBLE_EQ(p[0], 0.3 / 2.0);
  EXPECT_DOUBLE_EQ(p[1], 1.7 / 2.0);
}

TEST(Nqs, ScaleInvariance) {
  Rng rng(4);
  Tensor raw = Tensor::zeros({16});
  for (Eigen::Index i = 0; i < 16; ++i) raw.data()[i] = rng.uniform(0.01, 3.0);
  Tape tape;
  const Tensor p = normalize(tape, raw);
  const Tensor q = normalize(tape, ad::scale(tape, raw, 7.25));
  EXPECT_LE((p.data() - q.data()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Nqs, VanishingNormalizerIsError) {
  Tape tape;
  EXPECT_THROW(normalize(tape, Tensor::zeros({4})), NumericError);
}

TEST(Nqs, ClassifierZeroWeights) {
  Rng rng(1);
  NqsNetwork net = NqsNetwork::qml_classifier(rng);
  EXPECT_EQ(net.param_count(), 21u);
  net.zero_parameters();
  Tape tape;
  const Tensor logits = nqs_classifier_forward(tape, net, Tensor::full({1, 16}, 0.4));
  EXPECT_EQ(logits[0], 0.0);
  EXPECT_EQ(logits[1], 0.0);
  const Tensor p = ad::softmax(tape, logits);
  EXPECT_EQ(p[0], 0.5);
  EXPECT_THROW(nqs_classifier_forward(tape, net, Tensor::zeros({1, 15})), ShapeError);
}

TEST(Nqs, ClassifierGradient) {
  Rng rng(6);
  const NqsNetwork net = NqsNetwork::qml_classifier(rng);
  Tensor x = testing::random_tensor({5, 16}, rng);
  x.set_requires_grad(false);
  // Shift the hidden bias so the ReLU is active on most rows.
  net.parameters()[1].data()[0] = 0.8;
  const std::vector<int> y{0, 1, 1, 0, 1};
  auto f = [&](Tape& t, const std::vector<Tensor>&) {
    return ad::nll_loss(t, ad::log(t, ad::softmax(t, nqs_classifier_forward(t, net, x))), y);
  };
  EXPECT_LE(max_gradient_error(f, net.parameters()), 1e-4);
}

TEST(Nqs, DistributionGradient) {
  Rng rng(9);
  const NqsNetwork net = NqsNetwork::bitstring_default(4, rng, Activation::None, 6);
  auto f = [&](Tape& t, const std::vector<Tensor>&) {
    Tensor p = nqs_distribution(t, net, 4);
    return ad::sum(t, ad::mul(t, p, p));
  };
  EXPECT_LE(max_gradient_error(f, net.parameters()), 1e-4);
}

// --------------------------------------------------------------------- mps

TEST(FeatureMap, Values) {
  EXPECT_EQ(feature_map(0.3)[0], 0.3);
  EXPECT_DOUBLE_EQ(feature_map(0.3)[1], 0.7);
  EXPECT_EQ(feature_map(0.0), (std::array<double, 2>{0.0, 1.0}));
  EXPECT_EQ(feature_map(1.0), (std::array<double, 2>{1.0, 0.0}));
  EXPECT_EQ(feature_map(1.0 + 5e-10), (std::array<double, 2>{1.0, 0.0}));
  EXPECT_THROW(feature_map(1.001), std::domain_error);
  EXPECT_THROW(feature_map(-1e-6), std::domain_error);
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto xi = feature_map(rng.uniform());
    EXPECT_DOUBLE_EQ(xi[0] + xi[1], 1.0);
  }
}

std::vector<Tensor> ones_cores(std::size_t n) {
  std::vector<Tensor> cores;
  const std::size_t o = mps_output_site(n);
  for (std::size_t j = 0; j < n; ++j)
    cores.push_back(j == o ? Tensor::full({1, 2, 1, 1}, 1.0) : Tensor::full({1, 2, 1}, 1.0));
  return cores;
}

TEST(Mps, AllOnesBondOneIsConstant) {
  const MpsDecoder dec(ones_cores(6), mps_output_site(6));
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(6);
    for (auto& v : x) v = rng.uniform();
    EXPECT_NEAR(dec.contract(x)[0], 1.0, 1e-14);
  }
}

TEST(Mps, SingleSiteIsLinear) {
  Tensor core = Tensor::from({1, 2, 1, 2}, std::vector<double>{2.0, -1.0, 0.5, 3.0});
  const MpsDecoder dec({core}, 0);
  const std::vector<double> x{0.25};
  const auto out = dec.contract(x);
  EXPECT_DOUBLE_EQ(out[0], 0.25 * 2.0 + 0.75 * 0.5);
  EXPECT_DOUBLE_EQ(out[1], 0.25 * -1.0 + 0.75 * 3.0);
}

TEST(Mps, OutputSiteIsCenter) {
  EXPECT_EQ(mps_output_site(1), 0u);
  EXPECT_EQ(mps_output_site(2), 0u);
  EXPECT_EQ(mps_output_site(5), 2u);
  EXPECT_EQ(mps_output_site(14), 6u);
}

TEST(Mps, ParamCountMatchesConstruction) {
  Rng rng(1);
  for (std::size_t n : {1u, 2u, 3u, 7u, 11u})
    for (std::size_t r : {1u, 2u, 4u})
      for (std::size_t d : {1u, 8u}) {
        const MpsDecoder dec({n, r, d}, rng);
        EXPECT_EQ(dec.param_count(), decoder_param_count(n, r, d)) << n << " " << r << " " << d;
      }
  const MpsDecoder two({2, 1, 1}, rng);
  EXPECT_EQ(decoder_param_count(2, 1, 1), 4u);
  EXPECT_EQ(two.param_count(), 4u);
  // Interior cores away from the output site scale with r^2.
  const std::size_t n = 7;
  const std::size_t extra1 = decoder_param_count(n + 2, 2, 1) - decoder_param_count(n, 2, 1);
  const std::size_t extra2 = decoder_param_count(n + 2, 4, 1) - decoder_param_count(n, 4, 1);
  EXPECT_EQ(extra2, 4 * extra1);
}

TEST(Mps, InitialOutputsAreOrderOne) {
  Rng rng(5);
  const MpsDecoder dec({11, 2, 1}, rng);
  std::vector<double> x(11, 0.5);
  EXPECT_NEAR(dec.contract(x)[0], 1.0, 0.3);
}

TEST(Mps, Multilinearity) {
  Rng rng(7);
  const MpsDecoder dec({6, 3, 2}, rng);
  std::vector<std::array<double, 2>> xi(6);
  for (auto& v : xi) v = {rng.uniform(), rng.uniform()};
  const auto base = dec.contract_features(xi);
  for (std::size_t j = 0; j < 6; ++j) {
    auto scaled = xi;
    scaled[j] = {2 * xi[j][0], 2 * xi[j][1]};
    EXPECT_LE((dec.contract_features(scaled) - 2 * base).cwiseAbs().maxCoeff(),
              1e-12 * base.cwiseAbs().maxCoeff() + 1e-15);
  }
}

TEST(Mps, PermutationWithCoresLeavesOutputUnchanged) {
  // Reversing the chain: core j -> core n-1-j with bond legs swapped.
  Rng rng(13);
  const std::size_t n = 5;
  const MpsDecoder dec({n, 3, 2}, rng);
  const std::size_t o = dec.output_site();
  std::vector<Tensor> rev(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Tensor& c = dec.cores()[j];
    const std::size_t l = c.dim(0), r = c.dim(2), d = j == o ? c.dim(3) : 1;
    Shape shape{r, 2, l};
    if (j == o) shape.push_back(d);
    Tensor t = Tensor::zeros(shape);
    for (std::size_t a = 0; a < l; ++a)
      for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t b = 0; b < r; ++b)
          for (std::size_t k = 0; k < d; ++k)
            t.data()[static_cast<Eigen::Index>(((b * 2 + s) * l + a) * d + k)] =
                c.data()[static_cast<Eigen::Index>(((a * 2 + s) * r + b) * d + k)];
    rev[n - 1 - j] = t;
  }
  const MpsDecoder reversed(rev, n - 1 - o);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform();
    const std::vector<double> xr(x.rbegin(), x.rend());
    EXPECT_LE((dec.contract(x) - reversed.contract(xr)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Mps, ShapeErrorsNameSite) {
  std::vector<Tensor> cores = ones_cores(3);
  cores[2] = Tensor::full({2, 2, 1}, 1.0);
  try {
    MpsDecoder bad(cores, mps_output_site(3));
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("site"), std::string::npos);
  }
  Rng rng(1);
  const MpsDecoder dec({3, 2, 1}, rng);
  Tape tape;
  EXPECT_THROW(dec.forward(tape, Tensor::zeros({2, 4})), ShapeError);
}

TEST(Mps, BatchedForwardMatchesContract) {
  Rng rng(21);
  const MpsDecoder dec({7, 3, 4}, rng);
  Tensor x = Tensor::zeros({5, 7});
  for (Eigen::Index i = 0; i < x.data().size(); ++i) x.data()[i] = rng.uniform();
  Tape tape;
  const Tensor y = dec.forward(tape, x);
  for (std::size_t b = 0; b < 5; ++b) {
    std::vector<double> row(x.data().data() + b * 7, x.data().data() + (b + 1) * 7);
    const auto ref = dec.contract(row);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(y[b * 4 + k], ref[static_cast<Eigen::Index>(k)]);
  }
}

TEST(Mps, GradientMatchesFiniteDifference) {
  for (std::uint64_t trial = 0; trial < 12; ++trial) {
    Rng rng = Rng::derive(31, "mps-grad", {trial});
    const std::size_t n = 1 + rng.below(10), r = 1 + rng.below(4), d = 1 + rng.below(3);
    const MpsDecoder dec({n, r, d, 0.5}, rng);
    Tensor x = testing::random_tensor({3, n}, rng, 0.05, 0.95);
    Tensor w = Tensor::zeros({3, d});
    for (Eigen::Index i = 0; i < w.data().size(); ++i) w.data()[i] = rng.uniform(-1, 1);
    auto f = [&](Tape& t, const std::vector<Tensor>&) {
      return ad::sum(t, ad::mul(t, dec.forward(t, x), w));
    };
    std::vector<Tensor> params = dec.cores();
    params.push_back(x);
    EXPECT_LE(max_gradient_error(f, params), 1e-4) << "n=" << n << " r=" << r << " d=" << d;
  }
}

}  // namespace
}  // namespace hpqs
