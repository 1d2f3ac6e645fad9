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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lodsdf/network.hpp"
#include "lodsdf/sampling.hpp"

namespace lodsdf {

// Training diverged (non-finite loss); the message carries the step index.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// One latent code per training shape.
struct Codebook {
  Eigen::MatrixXd codes;  // |D| x d_l

  std::size_t size() const { return static_cast<std::size_t>(codes.rows()); }
  LatentCode row(std::size_t i) const { return codes.row(static_cast<Eigen::Index>(i)).transpose(); }
};

struct LossWeights {
  double lambda_coarse = 1e-2;
  double lambda_reg = 1e-4;
};

// Per-level mean squared errors of one loss evaluation.
struct LossBreakdown {
  double total = 0.0;
  std::vector<double> fine_mse;    // index = level - 1
  std::vector<double> coarse_mse;  // index = level - 1
  double reg = 0.0;
};

struct GradientSet {
  NetworkParams network;  // same layout as the parameters
  LatentCode latent;
};

struct LossResult {
  LossBreakdown parts;
  GradientSet grads;
};

// Loss of one shape summed over `levels`:
//   sum_i [ mean_fine (s - f_i)^2 + lambda_c mean_coarse (s - f_i)^2 ] + lambda_reg |l|^2
// with gradients for every parameter and the latent, in double precision.
// An empty group contributes nothing. Throws std::invalid_argument for an
// empty sample set and NumericalError for non-finite activations.
LossResult sdf_loss(const NetworkParams& params, const LatentCode& latent,
                    const SdfSampleSet& samples, std::span<const int> levels,
                    const LossWeights& weights);

// Forward-only evaluation of the same loss over all levels.
LossBreakdown evaluate_loss(const NetworkParams& params, const LatentCode& latent,
                            const SdfSampleSet& samples, const LossWeights& weights);

struct GradCheckReport {
  double max_relative_error = 0.0;
  // Keyed by parameter class: omega_raw, phi, weight, bias, head_weight,
  // head_bias, latent.
  std::map<std::string, double> per_class;
};

// Central finite differences of the single-sample, single-level loss against
// the analytic gradients, over every scalar parameter and latent entry. The
// error of an entry is |g - fd| / max(|g|, |fd|, 1e-3 * max_class |g|, 1e-12).
GradCheckReport grad_check(const NetworkParams& params, const LatentCode& latent,
                           const SdfSample& sample, int level, double h = 1e-4,
                           const LossWeights& weights = {});

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moments for the network and the codebook. Codebook rows
// keep their own step counters so bias correction only counts steps in which
// a row was part of the batch.
struct AdamState {
  AdamConfig config;
  NetworkParams first;
  NetworkParams second;
  long step = 0;
  Eigen::MatrixXd codebook_first;
  Eigen::MatrixXd codebook_second;
  std::vector<long> row_steps;

  static AdamState create(const NetworkParams& params, const Codebook& codebook,
                          const AdamConfig& config = {});
};

struct LatentGradient {
  std::size_t row = 0;
  LatentCode grad;
};

// Bias-corrected Adam update of every network tensor and of the codebook rows
// listed in `latent_grads`.
void adam_step(NetworkParams& params, Codebook& codebook, const NetworkParams& grads,
               std::span<const LatentGradient> latent_grads, AdamState& state, double lr);

// Adam on a single vector (used for latent fitting).
class VectorAdam {
 public:
  explicit VectorAdam(Eigen::Index size, const AdamConfig& config = {});
  void step(Eigen::VectorXd& x, const Eigen::VectorXd& grad, double lr);

 private:
  AdamConfig config_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long t_ = 0;
};

struct TrainConfig {
  long steps = 20000;
  int batch_shapes = 4;
  int samples_per_shape = 10000;  // drawn per shape at every step
  double lambda_coarse = 1e-2;
  double lambda_reg = 1e-4;
  double lr_start = 1e-2;
  double lr_end = 1e-4;
  double codebook_init_std = 0.01;
  std::uint64_t seed = 0;
  long history_every = 1;

  void validate() const;
};

// lr_start * (lr_end / lr_start)^(step / (steps - 1)).
double log_learning_rate(const TrainConfig& config, long step);

struct HistoryRow {
  long step = 0;
  double lr = 0.0;
  std::vector<double> fine_mse;  // per head
  double coarse_mse = 0.0;       // averaged over heads
  double reg = 0.0;
  double loss = 0.0;
};

struct TrainResult {
  NetworkParams params;
  Codebook codebook;
  std::vector<HistoryRow> history;
};

using ProgressCallback = std::function<void(const HistoryRow&)>;

// Auto-decoder training: network parameters and the codebook are optimized
// jointly. Each step draws `batch_shapes` shapes without replacement inside an
// epoch, subsamples each shape's stored samples (keeping its fine/coarse
// ratio), sums the loss over every head and takes one Adam step at the
// log-interpolated learning rate. Throws TrainingError on divergence.
TrainResult train(std::span<const SdfSampleSet> dataset, const TrainConfig& config,
                  const NetworkConfig& net_config, const ProgressCallback& progress = {});

// Starts from an already initialized network and codebook.
TrainResult train_from(std::span<const SdfSampleSet> dataset, const TrainConfig& config,
                       NetworkParams params, Codebook codebook,
                       const ProgressCallback& progress = {});

// CSV: step,lr,fine_mse_1..fine_mse_{N-1},coarse_mse,reg
void write_history_csv(std::ostream& out, std::span<const HistoryRow> history);

struct FitConfig {
  long steps = 1000;
  double lr = 1e-3;
  double lr_final = 1e-5;
  double decay_start = 0.9;    // fraction of steps before the linear decay
  int samples_per_step = 0;    // 0 uses every sample at every step
  double lambda_coarse = 1e-2;
  double lambda_reg = 1e-4;
  std::uint64_t seed = 0;
};

// Constant lr until decay_start * steps, then linear to lr_final at the last step.
double fit_learning_rate(const FitConfig& config, long step);

// Optimizes a latent for frozen network parameters, starting from zero.
LatentCode fit_latent(const NetworkParams& params, const SdfSampleSet& samples,
                      const FitConfig& config = {});

using SpatialMask = std::function<bool(const Vec3&)>;

// fit_latent restricted to samples with mask(x) true. Throws
// std::invalid_argument when fewer than 10% of the samples survive.
LatentCode fit_latent_masked(const NetworkParams& params, const SdfSampleSet& samples,
                             const SpatialMask& mask, const FitConfig& config = {});

SdfSampleSet apply_mask(const SdfSampleSet& samples, const SpatialMask& mask);

}  // namespace lodsdf
