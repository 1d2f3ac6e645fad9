// Copyright 2026 The lodsdf Authors
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

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "lodsdf/network.hpp"
#include "unit/test_util.hpp"

namespace lodsdf {
namespace {

using testing::random_latent;
using testing::random_point;
using testing::tiny_config;

TEST(BoundSchedule, ThirteenLayers) {
  const auto b = grouped_bound_schedule(13, 256.0);
  ASSERT_EQ(b.size(), 13u);
  const std::vector<double> expected = {256.0 / 48, 256.0 / 24, 256.0 / 24, 256.0 / 24,
                                        256.0 / 24, 256.0 / 16, 256.0 / 16, 256.0 / 16,
                                        256.0 / 8,  256.0 / 8,  256.0 / 8,  256.0 / 8,
                                        256.0 / 8};
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(b[i], expected[i], 1e-12) << i;
  NetworkConfig cfg = tiny_config(13, 4, 2, Conditioning::kHiddenConcat, 256.0);
  const auto params = init_network(cfg, 1);
  EXPECT_NEAR(params.cumulative_bound(12), 256.0, 1e-9);
}

TEST(BoundSchedule, SumsToTotalForEveryDepth) {
  for (int n = 2; n <= 20; ++n) {
    const auto b = grouped_bound_schedule(n, 64.0);
    ASSERT_EQ(static_cast<int>(b.size()), n);
    double sum = 0.0;
    for (double v : b) {
      EXPECT_GT(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 64.0, 1e-9);
  }
}

TEST(NetworkConfig, RejectsBadSchedules) {
  NetworkConfig cfg = tiny_config(3, 4, 2);
  cfg.bounds = {1.0, 2.0, 3.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.bounds = {4.0, 12.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.bounds = {4.0, 12.0, 0.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.bounds.clear();
  cfg.layers = 1;
  EXPECT_THROW(init_network(cfg, 0), ConfigError);
}

TEST(Init, DeterministicAndInsideBounds) {
  const auto cfg = tiny_config(5, 8, 3);
  const auto a = init_network(cfg, 42);
  const auto b = init_network(cfg, 42);
  std::vector<double> va, vb;
  for_each_tensor(a, [&](const std::string&, std::span<const double> t) { va.insert(va.end(), t.begin(), t.end()); });
  for_each_tensor(b, [&](const std::string&, std::span<const double> t) { vb.insert(vb.end(), t.begin(), t.end()); });
  EXPECT_EQ(va, vb);
  for (const auto& layer : a.frequency) {
    EXPECT_LT(layer.omega().cwiseAbs().maxCoeff(), layer.bound);
    EXPECT_LE(layer.phi.cwiseAbs().maxCoeff(), std::acos(-1.0));
  }
  EXPECT_EQ(a.hidden[0].weight.rows(), 11);
  EXPECT_EQ(a.heads[0].weight.size(), 11);
}

TEST(Init, InputConcatWidensFrequencies) {
  const auto p = init_network(tiny_config(3, 4, 2, Conditioning::kInputConcat), 0);
  EXPECT_EQ(p.frequency[0].omega_raw.cols(), 5);
  EXPECT_EQ(p.hidden[0].weight.rows(), 4);
  EXPECT_EQ(p.heads[0].weight.size(), 4);
  const auto q = init_network(tiny_config(3, 4, 2, Conditioning::kOutputConcat), 0);
  EXPECT_EQ(q.hidden[0].weight.rows(), 4);
  EXPECT_EQ(q.heads[0].weight.size(), 6);
}

TEST(Embed, ZeroFrequencyGivesSinPhi) {
  auto p = init_network(tiny_config(3, 6, 2), 5);
  auto layer = p.frequency[1];
  layer.omega_raw.setZero();
  const Eigen::VectorXd g = embed(layer, Vec3(0.3, -0.2, 0.1));
  for (int k = 0; k < 6; ++k) EXPECT_EQ(g[k], std::sin(layer.phi[k]));
  layer = p.frequency[2];
  layer.phi.setZero();
  EXPECT_EQ(embed(layer, Vec3(Vec3::Zero())).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Embed, MatchesScalarLoop) {
  const auto p = init_network(tiny_config(4, 7, 2), 8);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto& layer = p.frequency[static_cast<std::size_t>(trial % 4)];
    const Vec3 x = random_point(rng);
    const Eigen::VectorXd g = embed(layer, x);
    for (int k = 0; k < 7; ++k) {
      double arg = layer.phi[k];
      for (int j = 0; j < 3; ++j) arg += std::tanh(layer.omega_raw(k, j)) * layer.bound * x[j];
      EXPECT_NEAR(g[k], std::sin(arg), 1e-12);
    }
  }
}

TEST(ForwardAll, HandComputedScalarNetwork) {
  auto p = init_network(tiny_config(2, 1, 1), 0);
  p.frequency[0].omega_raw << 0.2, -0.1, 0.3;
  p.frequency[0].phi << 0.4;
  p.frequency[1].omega_raw << -0.5, 0.25, 0.05;
  p.frequency[1].phi << -0.7;
  p.hidden[0].weight << 0.5, -1.0, 2.0, 0.25;
  p.hidden[0].bias << 0.1, -0.2;
  p.heads[0].weight << 1.5, -0.5;
  p.heads[0].bias = 0.05;
  const Vec3 x(0.1, 0.2, -0.3);
  const double l = 0.6;
  const double b0 = p.frequency[0].bound;
  const double b1 = p.frequency[1].bound;
  const double g0 = std::sin(std::tanh(0.2) * b0 * 0.1 + std::tanh(-0.1) * b0 * 0.2 +
                             std::tanh(0.3) * b0 * -0.3 + 0.4);
  const double g1 = std::sin(std::tanh(-0.5) * b1 * 0.1 + std::tanh(0.25) * b1 * 0.2 +
                             std::tanh(0.05) * b1 * -0.3 - 0.7);
  const double a0 = 0.5 * g0 - 1.0 * l + 0.1;  // comma init is row-major: W = [[0.5, -1.0], [2.0, 0.25]]
  const double a1 = 2.0 * g0 + 0.25 * l - 0.2;
  const double s = 1.5 * (g1 * a0) - 0.5 * (l * a1) + 0.05;
  LatentCode latent(1);
  latent << l;
  EXPECT_NEAR(forward_all(p, x, latent).level(1), s, 1e-14);
}

TEST(ForwardAll, ZeroHeadGivesBias) {
  auto p = init_network(tiny_config(4, 5, 3), 2);
  for (auto& h : p.heads) {
    h.weight.setZero();
    h.bias = 0.125;
  }
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const auto trace = forward_all(p, random_point(rng), random_latent(3, k));
    for (double s : trace.sdf) EXPECT_EQ(s, 0.125);
  }
}

TEST(ForwardAll, RejectsLatentSizeMismatch) {
  const auto p = init_network(tiny_config(3, 4, 2), 0);
  EXPECT_THROW(forward_all(p, Vec3::Zero(), LatentCode::Zero(3)), std::invalid_argument);
}

TEST(ForwardAll, OutputConcatDifferenceIsConstantInX) {
  const auto p = init_network(tiny_config(4, 8, 3, Conditioning::kOutputConcat), 3);
  const auto l1 = random_latent(3, 1);
  const auto l2 = random_latent(3, 2);
  std::mt19937_64 rng(4);
  for (int level = 1; level <= 3; ++level) {
    std::vector<double> diffs;
    for (int k = 0; k < 200; ++k) {
      const Vec3 x = random_point(rng);
      diffs.push_back(forward_all(p, x, l1).level(level) - forward_all(p, x, l2).level(level));
    }
    const double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / diffs.size();
    double var = 0.0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    EXPECT_LT(var / diffs.size(), 1e-12);
  }
}

TEST(ForwardBatch, MatchesPerPointEvaluation) {
  for (auto c : {Conditioning::kInputConcat, Conditioning::kOutputConcat,
                 Conditioning::kHiddenConcat}) {
    const auto p = init_network(tiny_config(5, 8, 3, c), 6);
    const auto l = random_latent(3, 9);
    std::mt19937_64 rng(5);
    std::vector<Vec3> xs;
    for (int k = 0; k < 1000; ++k) xs.push_back(random_point(rng));
    for (int level = 1; level <= 4; ++level) {
      const auto batch = forward_batch(p, xs, l, level);
      for (std::size_t k = 0; k < xs.size(); ++k) {
        ASSERT_NEAR(batch[k], forward_all(p, xs[k], l).level(level), 1e-12);
      }
    }
    const auto one = forward_batch(p, std::span(xs.data(), 1), l, 2);
    EXPECT_NEAR(one[0], forward_all(p, xs[0], l).level(2), 1e-12);
  }
}

TEST(ForwardBatch, TruncatesAtLevel) {
  const auto p = init_network(tiny_config(6, 4, 2), 1);
  std::vector<Vec3> xs(37, Vec3(0.1, 0.2, 0.3));
  for (int level = 1; level <= 5; ++level) {
    OpCounter counter;
    forward_batch(p, xs, LatentCode::Zero(2), level, &counter);
    ASSERT_EQ(counter.layer_columns.size(), 6u);
    for (int layer = 0; layer < 6; ++layer) {
      EXPECT_EQ(counter.layer_columns[static_cast<std::size_t>(layer)], layer <= level ? 37u : 0u);
    }
  }
  EXPECT_THROW(forward_batch(p, xs, LatentCode::Zero(2), 0), std::out_of_range);
  EXPECT_THROW(forward_batch(p, xs, LatentCode::Zero(2), 6), std::out_of_range);
}

TEST(Collapse, AlphaIsMaxAbs) {
  const auto p = init_network(tiny_config(3, 4, 2), 0);
  LatentCode l(2);
  l << 0.3, -0.8;
  EXPECT_EQ(collapse_latent(p, l).alpha, 0.8);
}

TEST(Collapse, ZeroLatent) {
  const auto p = init_network(tiny_config(4, 5, 3), 4);
  const auto u = collapse_latent(p, LatentCode::Zero(3));
  EXPECT_EQ(u.alpha, 0.0);
  for (const auto& h : u.hidden) EXPECT_EQ(h.weight.rightCols(3).cwiseAbs().maxCoeff(), 0.0);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    const Vec3 x = random_point(rng);
    const auto trace = forward_all(p, x, LatentCode::Zero(3));
    for (int level = 1; level <= 3; ++level) {
      EXPECT_NEAR(forward_unconditional(u, x, level), trace.level(level),
                  1e-9 * std::max(1.0, std::abs(trace.level(level))));
    }
  }
}

TEST(Unconditional, HandComputedWidthOne) {
  UnconditionalParams u;
  u.omega = {Eigen::MatrixXd(1, 3), Eigen::MatrixXd(1, 3)};
  u.omega[0] << 2.0, 0.0, -1.0;
  u.omega[1] << 0.5, 1.0, 3.0;
  u.phi = {Eigen::VectorXd::Constant(1, 0.2), Eigen::VectorXd::Constant(1, -0.4)};
  HiddenLayer h;
  h.weight = Eigen::MatrixXd::Constant(1, 1, 1.5);
  h.bias = Eigen::VectorXd::Constant(1, 0.3);
  u.hidden = {h};
  OutputHead head;
  head.weight = Eigen::VectorXd::Constant(1, -2.0);
  head.bias = 0.1;
  u.heads = {head};
  const Vec3 x(0.2, -0.1, 0.4);
  const double z0 = std::sin(2.0 * 0.2 - 1.0 * 0.4 + 0.2);
  const double z1 = std::sin(0.5 * 0.2 + 1.0 * -0.1 + 3.0 * 0.4 - 0.4) * (1.5 * z0 + 0.3);
  EXPECT_NEAR(forward_unconditional(u, x, 1), -2.0 * z1 + 0.1, 1e-15);
  EXPECT_THROW(forward_unconditional(u, x, 2), std::out_of_range);
}

TEST(Unconditional, IdentityWeightsBoundOutput) {
  const auto p = init_network(tiny_config(4, 6, 2), 3);
  auto u = collapse_latent(p, random_latent(2, 3));
  for (auto& h : u.hidden) {
    h.weight.setIdentity();
    h.bias.setZero();
  }
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const Vec3 x = random_point(rng, 2.0);
    for (int level = 1; level <= 3; ++level) {
      const auto& head = u.heads[static_cast<std::size_t>(level - 1)];
      EXPECT_LE(std::abs(forward_unconditional(u, x, level)),
                head.weight.lpNorm<1>() + std::abs(head.bias) + 1e-12);
    }
  }
}

TEST(Clamp, KeepsFrequenciesInsideBounds) {
  auto p = init_network(tiny_config(3, 4, 2), 0);
  p.frequency[1].omega_raw(0, 0) = 1e6;
  p.frequency[2].omega_raw(1, 2) = -50.0;
  clamp_frequency_parameters(p);
  for (const auto& layer : p.frequency) {
    EXPECT_LT(layer.omega().cwiseAbs().maxCoeff(), layer.bound);
  }
}

TEST(NetworkField, MatchesForwardBatch) {
  const auto p = init_network(tiny_config(4, 6, 2), 10);
  const auto l = random_latent(2, 4);
  std::mt19937_64 rng(3);
  std::vector<Vec3> xs;
  for (int k = 0; k < 5000; ++k) xs.push_back(random_point(rng));
  std::vector<double> out(xs.size());
  NetworkField(p, l, 3)(xs, out);
  EXPECT_EQ(out, forward_batch(p, xs, l, 3));
  EXPECT_THROW(NetworkField(p, l, 4), std::out_of_range);
}

}  // namespace
}  // namespace lodsdf
