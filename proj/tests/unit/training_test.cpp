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
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "lodsdf/analytic_shape.hpp"
#include "lodsdf/training.hpp"
#include "unit/test_util.hpp"

namespace lodsdf {
namespace {

using testing::random_latent;
using testing::random_point;
using testing::tiny_config;

// Network whose every head outputs `value` regardless of the input.
NetworkParams constant_network(double value) {
  auto p = init_network(tiny_config(3, 4, 2), 0);
  for (auto& h : p.heads) {
    h.weight.setZero();
    h.bias = value;
  }
  return p;
}

SdfSampleSet constant_samples(double target, int fine, int coarse) {
  SdfSampleSet s;
  std::mt19937_64 rng(1);
  for (int k = 0; k < fine; ++k) s.fine.push_back({random_point(rng), target});
  for (int k = 0; k < coarse; ++k) s.coarse.push_back({random_point(rng), target});
  return s;
}

TEST(Loss, ExactPredictionsGiveZero) {
  const auto p = constant_network(0.25);
  const int levels[] = {1, 2};
  const auto r = sdf_loss(p, LatentCode::Zero(2), constant_samples(0.25, 5, 7), levels, {});
  EXPECT_EQ(r.parts.total, 0.0);
  LossWeights no_reg{1e-2, 0.0};
  const auto r2 = sdf_loss(p, random_latent(2, 1), constant_samples(0.25, 5, 7), levels, no_reg);
  EXPECT_EQ(r2.parts.total, 0.0);
}

TEST(Loss, SingleFineSample) {
  const auto p = constant_network(0.25);
  const int levels[] = {2};
  const auto r = sdf_loss(p, LatentCode::Zero(2), constant_samples(0.1, 1, 0), levels, {1e-2, 0.0});
  EXPECT_NEAR(r.parts.total, 0.15 * 0.15, 1e-15);
}

TEST(Loss, SingleCoarseSample) {
  const auto p = constant_network(0.25);
  const int levels[] = {1};
  const auto r = sdf_loss(p, LatentCode::Zero(2), constant_samples(0.1, 0, 1), levels, {1e-2, 0.0});
  EXPECT_NEAR(r.parts.total, 0.01 * 0.15 * 0.15, 1e-16);
}

TEST(Loss, RegularizerGradientIsExact) {
  const auto p = constant_network(0.25);
  const auto l = random_latent(2, 3);
  const int levels[] = {1, 2};
  const auto r = sdf_loss(p, l, constant_samples(0.1, 3, 3), levels, {1e-2, 1e-4});
  EXPECT_EQ(r.grads.latent, (2.0 * 1e-4 * l).eval());
}

TEST(Loss, RejectsEmptySamplesAndBadLevels) {
  const auto p = constant_network(0.0);
  const int levels[] = {1};
  EXPECT_THROW(sdf_loss(p, LatentCode::Zero(2), SdfSampleSet{}, levels, {}), std::invalid_argument);
  const int bad[] = {3};
  EXPECT_THROW(sdf_loss(p, LatentCode::Zero(2), constant_samples(0, 1, 1), bad, {}),
               std::out_of_range);
}

TEST(Loss, NonFiniteActivationNamesLayer) {
  auto p = init_network(tiny_config(4, 4, 2), 0);
  p.hidden[1].weight(0, 0) = std::numeric_limits<double>::quiet_NaN();
  const int levels[] = {3};
  try {
    sdf_loss(p, LatentCode::Zero(2), constant_samples(0, 2, 2), levels, {});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("layer 2"), std::string::npos) << e.what();
  }
}

TEST(GradCheck, TinyNetworksAllDesigns) {
  for (auto c : {Conditioning::kHiddenConcat, Conditioning::kInputConcat,
                 Conditioning::kOutputConcat}) {
    const auto p = init_network(tiny_config(3, 4, 2, c), 11);
    const SdfSample sample{Vec3(0.1, -0.3, 0.2), 0.05};
    for (int level = 1; level <= 2; ++level) {
      const auto report = grad_check(p, random_latent(2, 5), sample, level);
      EXPECT_LT(report.max_relative_error, 1e-4) << to_string(c) << " level " << level;
      EXPECT_EQ(report.per_class.size(), 7u);
    }
  }
}

TEST(GradCheck, ZeroHeadEntryBlocksFrequencyGradient) {
  auto p = init_network(tiny_config(3, 4, 2), 2);
  p.heads[0].weight[1] = 0.0;
  SdfSampleSet s;
  s.fine.push_back({Vec3(0.2, 0.1, -0.1), 0.3});
  const int levels[] = {1};
  const auto r = sdf_loss(p, random_latent(2, 1), s, levels, {});
  EXPECT_EQ(r.grads.network.frequency[1].omega_raw.row(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(r.grads.network.frequency[1].phi[1], 0.0);
  EXPECT_NE(r.grads.network.frequency[1].phi[0], 0.0);
}

TEST(GradCheck, LatentDirectionalDerivative) {
  const auto p = init_network(tiny_config(4, 6, 3), 4);
  SdfSampleSet s = constant_samples(0.02, 4, 6);
  const int levels[] = {1, 2, 3};
  const auto l = random_latent(3, 6);
  const auto r = sdf_loss(p, l, s, levels, {});
  const LatentCode dir = random_latent(3, 7);
  for (double h : {1e-3, 1e-4}) {
    const double up = sdf_loss(p, l + h * dir, s, levels, {}).parts.total;
    const double predicted = r.parts.total + h * r.grads.latent.dot(dir);
    EXPECT_LT(std::abs(up - predicted), 50.0 * h * h * (1.0 + dir.squaredNorm()));
  }
}

TEST(Adam, ZeroGradientLeavesParameters) {
  auto p = init_network(tiny_config(3, 4, 2), 0);
  const auto before = p;
  Codebook cb;
  cb.codes = Eigen::MatrixXd::Constant(2, 2, 0.5);
  auto state = AdamState::create(p, cb);
  std::vector<LatentGradient> lg = {{1, LatentCode::Zero(2)}};
  adam_step(p, cb, p.zeros_like(), lg, state, 0.1);
  EXPECT_EQ(p.hidden[0].weight, before.hidden[0].weight);
  EXPECT_EQ(p.frequency[2].omega_raw, before.frequency[2].omega_raw);
  EXPECT_EQ(cb.codes, Eigen::MatrixXd::Constant(2, 2, 0.5));
  EXPECT_EQ(state.row_steps, (std::vector<long>{0, 1}));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  VectorAdam adam(1);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  adam.step(x, Eigen::VectorXd::Ones(1), 0.1);
  EXPECT_NEAR(x[0], -0.1, 1e-8);
}

TEST(Schedules, LearningRates) {
  TrainConfig tc;
  tc.steps = 101;
  EXPECT_DOUBLE_EQ(log_learning_rate(tc, 0), 1e-2);
  EXPECT_NEAR(log_learning_rate(tc, 50), 1e-3, 1e-15);
  EXPECT_NEAR(log_learning_rate(tc, 100), 1e-4, 1e-18);
  FitConfig fc;
  EXPECT_EQ(fit_learning_rate(fc, 0), 1e-3);
  EXPECT_EQ(fit_learning_rate(fc, 899), 1e-3);
  EXPECT_EQ(fit_learning_rate(fc, 900), 1e-3);
  EXPECT_NEAR(fit_learning_rate(fc, 999), 1e-5, 1e-18);
  EXPECT_LT(fit_learning_rate(fc, 950), 1e-3);
}

TEST(TrainConfig, Validation) {
  TrainConfig tc;
  tc.lambda_coarse = 1.0;
  EXPECT_THROW(tc.validate(), ConfigError);
  tc = {};
  tc.lr_end = 1.0;
  EXPECT_THROW(tc.validate(), ConfigError);
}

std::vector<SdfSampleSet> small_dataset(int shapes, std::size_t total) {
  std::vector<SdfSampleSet> out;
  SamplingConfig sc;
  sc.total = total;
  auto set = default_shape_set();
  for (int k = 0; k < shapes; ++k) {
    out.push_back(sample_training_set(make_oracle(set[static_cast<std::size_t>(k)].second), sc, k));
  }
  return out;
}

TEST(Train, DeterministicAndShaped) {
  const auto data = small_dataset(3, 2000);
  TrainConfig tc;
  tc.steps = 30;
  tc.batch_shapes = 2;
  tc.samples_per_shape = 128;
  tc.seed = 4;
  const auto cfg = tiny_config(4, 8, 4);
  const auto a = train(data, tc, cfg);
  const auto b = train(data, tc, cfg);
  EXPECT_EQ(a.codebook.size(), 3u);
  EXPECT_EQ(a.codebook.codes, b.codebook.codes);
  EXPECT_EQ(a.params.hidden[1].weight, b.params.hidden[1].weight);
  ASSERT_EQ(a.history.size(), 30u);
  EXPECT_EQ(a.history[5].loss, b.history[5].loss);
  for (const auto& layer : a.params.frequency) {
    EXPECT_LT(layer.omega().cwiseAbs().maxCoeff(), layer.bound);
  }
  std::ostringstream csv;
  write_history_csv(csv, a.history);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
            "step,lr,fine_mse_1,fine_mse_2,fine_mse_3,coarse_mse,reg");
}

TEST(Train, DivergenceReportsStep) {
  auto data = small_dataset(1, 200);
  data[0].fine[0].distance = std::numeric_limits<double>::quiet_NaN();
  TrainConfig tc;
  tc.steps = 5;
  tc.samples_per_shape = 400;
  try {
    train(data, tc, tiny_config(3, 4, 2));
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.step(), 0);
  }
  EXPECT_THROW(train({}, tc, tiny_config(3, 4, 2)), std::invalid_argument);
}

// Single sphere with a reduced network, trained full batch: the deepest head
// fits the fine samples and the 200-step average loss keeps falling.
TEST(Train, SingleSphereConverges) {
  SamplingConfig sc;
  sc.total = 1024;
  const auto oracle = make_oracle(AnalyticShape::sphere(Vec3::Zero(), 0.35));
  const std::vector<SdfSampleSet> data = {sample_training_set(oracle, sc, 0)};
  TrainConfig tc;
  tc.steps = 5000;
  tc.batch_shapes = 1;
  tc.samples_per_shape = 1024;
  NetworkConfig cfg;
  cfg.hidden_dim = 32;
  cfg.latent_dim = 16;
  const auto r = train(data, tc, cfg);
  const auto final = evaluate_loss(r.params, r.codebook.row(0), data[0], {});
  EXPECT_LT(final.fine_mse.back(), 1e-4);
  std::vector<double> block;
  for (std::size_t b = 0; b + 200 <= r.history.size(); b += 200) {
    double sum = 0.0;
    for (std::size_t k = b; k < b + 200; ++k) sum += r.history[k].loss;
    block.push_back(sum / 200);
  }
  for (std::size_t b = 1; b < block.size(); ++b) EXPECT_LE(block[b], block[b - 1]) << b;

  // Refitting the training shape from l = 0 lands near its codebook loss.
  const auto code_loss = evaluate_loss(r.params, r.codebook.row(0), data[0], {});
  const auto fitted = fit_latent(r.params, data[0]);
  const auto fit_loss = evaluate_loss(r.params, fitted, data[0], {});
  EXPECT_LE(fit_loss.total, 2.0 * code_loss.total);
}

TEST(Fit, ZeroStepsAndDeterminism) {
  const auto p = init_network(tiny_config(3, 6, 3), 1);
  const auto data = small_dataset(1, 400);
  FitConfig fc;
  fc.steps = 0;
  EXPECT_EQ(fit_latent(p, data[0], fc), LatentCode::Zero(3));
  fc.steps = 50;
  fc.samples_per_step = 64;
  fc.seed = 3;
  const auto a = fit_latent(p, data[0], fc);
  EXPECT_EQ(a, fit_latent(p, data[0], fc));
  EXPECT_NE(a, LatentCode::Zero(3));
}

TEST(Fit, MaskedVariants) {
  const auto p = init_network(tiny_config(3, 6, 3), 1);
  const auto data = small_dataset(1, 400);
  FitConfig fc;
  fc.steps = 20;
  EXPECT_EQ(fit_latent_masked(p, data[0], [](const Vec3&) { return true; }, fc),
            fit_latent(p, data[0], fc));
  EXPECT_THROW(fit_latent_masked(p, data[0], [](const Vec3&) { return false; }, fc),
               std::invalid_argument);
  EXPECT_THROW(fit_latent_masked(p, data[0], [](const Vec3& x) { return x.x() > 0.53; }, fc),
               std::invalid_argument);
  const auto half = apply_mask(data[0], [](const Vec3& x) { return x.x() < 0; });
  for (const auto& s : half.fine) EXPECT_LT(s.position.x(), 0.0);
}

}  // namespace
}  // namespace lodsdf
