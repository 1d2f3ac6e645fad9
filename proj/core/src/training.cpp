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

#include "lodsdf/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lodsdf/kernel.hpp"

namespace lodsdf {
namespace {

template <class T>
void load_points(const SdfSampleSet& samples, typename MfnKernel<T>::Mat& points,
                 Eigen::Matrix<T, 1, Eigen::Dynamic>& targets) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  points.resize(3, n);
  targets.resize(n);
  Eigen::Index c = 0;
  for (const auto* group : {&samples.fine, &samples.coarse}) {
    for (const auto& s : *group) {
      points.col(c) = s.position.template cast<T>();
      targets[c] = static_cast<T>(s.distance);
      ++c;
    }
  }
}

std::vector<std::span<double>> tensor_spans(NetworkParams& p) {
  std::vector<std::span<double>> out;
  for_each_tensor(p, [&](const std::string&, std::span<double> t) { out.push_back(t); });
  return out;
}

std::string tensor_class(const std::string& name) {
  const auto dot = name.find('.');
  const std::string field = name.substr(dot + 1);
  if (name.rfind("head", 0) == 0) return "head_" + field;
  return field;
}

}  // namespace

LossResult sdf_loss(const NetworkParams& params, const LatentCode& latent,
                    const SdfSampleSet& samples, std::span<const int> levels,
                    const LossWeights& weights) {
  if (samples.size() == 0) throw std::invalid_argument("sdf_loss: empty sample set");
  if (levels.empty()) throw std::invalid_argument("sdf_loss: no levels selected");
  const int n_levels = params.levels();
  for (int level : levels) {
    if (level < 1 || level > n_levels) throw std::out_of_range("sdf_loss: level out of range");
  }
  const int top = *std::max_element(levels.begin(), levels.end());

  using K = MfnKernel<double>;
  const K kernel(params);
  K::Workspace ws;
  ws.latent = latent;
  Eigen::RowVectorXd targets;
  load_points<double>(samples, ws.points, targets);
  kernel.forward(ws, top);

  const auto n_fine = static_cast<Eigen::Index>(samples.fine.size());
  const auto n_coarse = static_cast<Eigen::Index>(samples.coarse.size());
  const Eigen::MatrixXd residual = ws.sdf.rowwise() - targets;

  LossResult result;
  result.parts.fine_mse.assign(static_cast<std::size_t>(n_levels), 0.0);
  result.parts.coarse_mse.assign(static_cast<std::size_t>(n_levels), 0.0);
  Eigen::MatrixXd dsdf = Eigen::MatrixXd::Zero(top, residual.cols());
  double total = 0.0;
  for (int level : levels) {
    const auto r = residual.row(level - 1);
    const auto ul = static_cast<std::size_t>(level - 1);
    if (n_fine > 0) {
      const double mse = r.head(n_fine).squaredNorm() / double(n_fine);
      result.parts.fine_mse[ul] = mse;
      total += mse;
      dsdf.row(level - 1).head(n_fine) += (2.0 / double(n_fine)) * r.head(n_fine);
    }
    if (n_coarse > 0) {
      const double mse = r.tail(n_coarse).squaredNorm() / double(n_coarse);
      result.parts.coarse_mse[ul] = mse;
      total += weights.lambda_coarse * mse;
      dsdf.row(level - 1).tail(n_coarse) +=
          (2.0 * weights.lambda_coarse / double(n_coarse)) * r.tail(n_coarse);
    }
  }
  result.parts.reg = weights.lambda_reg * latent.squaredNorm();
  result.parts.total = total + result.parts.reg;

  auto grads = kernel.make_gradients();
  Eigen::VectorXd dlatent = Eigen::VectorXd::Zero(latent.size());
  kernel.backward(ws, dsdf, &grads, &dlatent);
  result.grads.network = params.zeros_like();
  K::accumulate(params, grads, result.grads.network);
  result.grads.latent = dlatent + 2.0 * weights.lambda_reg * latent;
  return result;
}

LossBreakdown evaluate_loss(const NetworkParams& params, const LatentCode& latent,
                            const SdfSampleSet& samples, const LossWeights& weights) {
  const int n_levels = params.levels();
  LossBreakdown out;
  out.fine_mse.assign(static_cast<std::size_t>(n_levels), 0.0);
  out.coarse_mse.assign(static_cast<std::size_t>(n_levels), 0.0);

  using K = MfnKernel<double>;
  const K kernel(params);
  K::Workspace ws;
  ws.latent = latent;
  constexpr std::size_t kChunk = 4096;
  for (auto [group, mse] : {std::pair{&samples.fine, &out.fine_mse},
                            std::pair{&samples.coarse, &out.coarse_mse}}) {
    if (group->empty()) continue;
    std::vector<double> sums(static_cast<std::size_t>(n_levels), 0.0);
    for (std::size_t begin = 0; begin < group->size(); begin += kChunk) {
      const std::size_t n = std::min(kChunk, group->size() - begin);
      ws.points.resize(3, static_cast<Eigen::Index>(n));
      Eigen::RowVectorXd targets(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < n; ++k) {
        ws.points.col(static_cast<Eigen::Index>(k)) = (*group)[begin + k].position;
        targets[static_cast<Eigen::Index>(k)] = (*group)[begin + k].distance;
      }
      kernel.forward(ws, n_levels);
      for (int i = 0; i < n_levels; ++i) {
        sums[static_cast<std::size_t>(i)] += (ws.sdf.row(i) - targets).squaredNorm();
      }
    }
    for (int i = 0; i < n_levels; ++i) {
      (*mse)[static_cast<std::size_t>(i)] = sums[static_cast<std::size_t>(i)] / double(group->size());
    }
  }
  for (int i = 0; i < n_levels; ++i) {
    out.total += out.fine_mse[static_cast<std::size_t>(i)] +
                 weights.lambda_coarse * out.coarse_mse[static_cast<std::size_t>(i)];
  }
  out.reg = weights.lambda_reg * latent.squaredNorm();
  out.total += out.reg;
  return out;
}

GradCheckReport grad_check(const NetworkParams& params, const LatentCode& latent,
                           const SdfSample& sample, int level, double h,
                           const LossWeights& weights) {
  SdfSampleSet single;
  single.fine.push_back(sample);
  const int levels[] = {level};
  auto loss_at = [&](const NetworkParams& p, const LatentCode& l) {
    return sdf_loss(p, l, single, levels, weights).parts.total;
  };
  const auto analytic = sdf_loss(params, latent, single, levels, weights).grads;

  struct Entry {
    std::string cls;
    double g;
    double fd;
  };
  std::vector<Entry> entries;

  NetworkParams probe = params;
  NetworkParams grads = analytic.network;
  std::vector<std::string> names;
  for_each_tensor(probe, [&](const std::string& name, std::span<double>) { names.push_back(name); });
  auto probe_spans = tensor_spans(probe);
  auto grad_spans = tensor_spans(grads);
  for (std::size_t t = 0; t < probe_spans.size(); ++t) {
    for (std::size_t k = 0; k < probe_spans[t].size(); ++k) {
      double& v = probe_spans[t][k];
      const double saved = v;
      v = saved + h;
      const double up = loss_at(probe, latent);
      v = saved - h;
      const double down = loss_at(probe, latent);
      v = saved;
      entries.push_back({tensor_class(names[t]), grad_spans[t][k], (up - down) / (2.0 * h)});
    }
  }
  LatentCode probe_latent = latent;
  for (Eigen::Index k = 0; k < latent.size(); ++k) {
    probe_latent[k] = latent[k] + h;
    const double up = loss_at(params, probe_latent);
    probe_latent[k] = latent[k] - h;
    const double down = loss_at(params, probe_latent);
    probe_latent[k] = latent[k];
    entries.push_back({"latent", analytic.latent[k], (up - down) / (2.0 * h)});
  }

  std::map<std::string, double> class_scale;
  for (const auto& e : entries) {
    class_scale[e.cls] = std::max(class_scale[e.cls], std::abs(e.g));
  }
  GradCheckReport report;
  for (const auto& e : entries) {
    const double denom =
        std::max({std::abs(e.g), std::abs(e.fd), 1e-3 * class_scale[e.cls], 1e-12});
    const double err = std::abs(e.g - e.fd) / denom;
    report.per_class[e.cls] = std::max(report.per_class[e.cls], err);
    report.max_relative_error = std::max(report.max_relative_error, err);
  }
  return report;
}

AdamState AdamState::create(const NetworkParams& params, const Codebook& codebook,
                            const AdamConfig& config) {
  AdamState s;
  s.config = config;
  s.first = params.zeros_like();
  s.second = params.zeros_like();
  s.codebook_first = Eigen::MatrixXd::Zero(codebook.codes.rows(), codebook.codes.cols());
  s.codebook_second = s.codebook_first;
  s.row_steps.assign(codebook.size(), 0);
  return s;
}

namespace {

void adam_update(std::span<double> x, std::span<const double> g, std::span<double> m,
                 std::span<double> v, const AdamConfig& c, long t, double lr) {
  const double bc1 = 1.0 - std::pow(c.beta1, double(t));
  const double bc2 = 1.0 - std::pow(c.beta2, double(t));
  for (std::size_t k = 0; k < x.size(); ++k) {
    m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g[k];
    v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g[k] * g[k];
    x[k] -= lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + c.epsilon);
  }
}

}  // namespace

void adam_step(NetworkParams& params, Codebook& codebook, const NetworkParams& grads,
               std::span<const LatentGradient> latent_grads, AdamState& state, double lr) {
  ++state.step;
  auto x = tensor_spans(params);
  auto g = tensor_spans(const_cast<NetworkParams&>(grads));
  auto m = tensor_spans(state.first);
  auto v = tensor_spans(state.second);
  if (x.size() != g.size() || x.size() != m.size() || x.size() != v.size()) {
    throw std::invalid_argument("adam_step: state does not match parameters");
  }
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t].size() != g[t].size() || x[t].size() != m[t].size()) {
      throw std::invalid_argument("adam_step: tensor shape mismatch");
    }
    adam_update(x[t], g[t], m[t], v[t], state.config, state.step, lr);
  }

  const Eigen::Index d_l = codebook.codes.cols();
  for (const auto& lg : latent_grads) {
    if (lg.row >= codebook.size() || lg.grad.size() != d_l) {
      throw std::invalid_argument("adam_step: bad codebook gradient");
    }
    const auto r = static_cast<Eigen::Index>(lg.row);
    Eigen::VectorXd row = codebook.codes.row(r).transpose();
    Eigen::VectorXd m_row = state.codebook_first.row(r).transpose();
    Eigen::VectorXd v_row = state.codebook_second.row(r).transpose();
    const long t = ++state.row_steps[lg.row];
    adam_update(std::span(row.data(), std::size_t(d_l)),
                std::span(lg.grad.data(), std::size_t(d_l)),
                std::span(m_row.data(), std::size_t(d_l)),
                std::span(v_row.data(), std::size_t(d_l)), state.config, t, lr);
    codebook.codes.row(r) = row.transpose();
    state.codebook_first.row(r) = m_row.transpose();
    state.codebook_second.row(r) = v_row.transpose();
  }
}

VectorAdam::VectorAdam(Eigen::Index size, const AdamConfig& config)
    : config_(config), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void VectorAdam::step(Eigen::VectorXd& x, const Eigen::VectorXd& grad, double lr) {
  ++t_;
  const auto n = static_cast<std::size_t>(x.size());
  adam_update(std::span(x.data(), n), std::span(grad.data(), n), std::span(m_.data(), n),
              std::span(v_.data(), n), config_, t_, lr);
}

void TrainConfig::validate() const {
  if (steps < 1) throw ConfigError("train.steps must be >= 1");
  if (batch_shapes < 1) throw ConfigError("train.batch_shapes must be >= 1");
  if (samples_per_shape < 2) throw ConfigError("train.samples_per_shape must be >= 2");
  if (!(lambda_coarse > 0.0 && lambda_coarse < 1.0)) {
    throw ConfigError("train.lambda_coarse must lie in (0, 1)");
  }
  if (lambda_reg < 0.0) throw ConfigError("train.lambda_reg must be >= 0");
  if (!(lr_end > 0.0 && lr_start >= lr_end)) {
    throw ConfigError("train needs lr_start >= lr_end > 0");
  }
  if (history_every < 1) throw ConfigError("train.history_every must be >= 1");
}

double log_learning_rate(const TrainConfig& config, long step) {
  if (config.steps <= 1) return config.lr_start;
  const double t = double(step) / double(config.steps - 1);
  return config.lr_start * std::pow(config.lr_end / config.lr_start, t);
}

TrainResult train(std::span<const SdfSampleSet> dataset, const TrainConfig& config,
                  const NetworkConfig& net_config, const ProgressCallback& progress) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  config.validate();
  NetworkParams params = init_network(net_config, config.seed);
  std::seed_seq seq{config.seed, std::uint64_t{0xC0DE}};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, config.codebook_init_std);
  Codebook codebook;
  codebook.codes.resize(static_cast<Eigen::Index>(dataset.size()), net_config.latent_dim);
  for (Eigen::Index r = 0; r < codebook.codes.rows(); ++r) {
    for (Eigen::Index c = 0; c < codebook.codes.cols(); ++c) codebook.codes(r, c) = normal(rng);
  }
  return train_from(dataset, config, std::move(params), std::move(codebook), progress);
}

TrainResult train_from(std::span<const SdfSampleSet> dataset, const TrainConfig& config,
                       NetworkParams params, Codebook codebook,
                       const ProgressCallback& progress) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  config.validate();
  if (codebook.size() != dataset.size()) {
    throw std::invalid_argument("train: codebook rows must equal the dataset size");
  }
  for (const auto& set : dataset) {
    if (set.size() == 0) throw std::invalid_argument("train: shape without samples");
  }
  using K = MfnKernel<float>;
  const int levels = params.levels();
  const int batch = std::min<int>(config.batch_shapes, static_cast<int>(dataset.size()));
  const double inv_batch = 1.0 / double(batch);

  std::seed_seq seq{config.seed, std::uint64_t{0xBA7C4}};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = order.size();

  AdamState adam = AdamState::create(params, codebook);
  TrainResult result;
  K::Workspace ws;
  Eigen::RowVectorXf targets;
  Eigen::MatrixXf dsdf;
  K::Vec dlatent;

  for (long step = 0; step < config.steps; ++step) {
    const double lr = log_learning_rate(config, step);
    const K kernel(params);
    auto grads = kernel.make_gradients();
    std::vector<LatentGradient> latent_grads;

    if (cursor + static_cast<std::size_t>(batch) > order.size()) {
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    HistoryRow row;
    row.step = step;
    row.lr = lr;
    row.fine_mse.assign(static_cast<std::size_t>(levels), 0.0);

    for (int b = 0; b < batch; ++b) {
      const std::size_t shape = order[cursor++];
      const auto& set = dataset[shape];
      const LatentCode latent = codebook.row(shape);

      // Shapes with no more stored samples than the per-step budget use all
      // of them (full batch). Otherwise draw with replacement, keeping the
      // stored fine/coarse ratio with at least one sample per non-empty group.
      const bool full = set.size() <= static_cast<std::size_t>(config.samples_per_shape);
      const int n = full ? static_cast<int>(set.size()) : config.samples_per_shape;
      int n_fine = 0;
      if (full) {
        n_fine = static_cast<int>(set.fine.size());
      } else if (!set.fine.empty() && !set.coarse.empty()) {
        const double ratio = double(set.fine.size()) / double(set.size());
        n_fine = std::clamp(static_cast<int>(std::lround(ratio * n)), 1, n - 1);
      } else if (!set.fine.empty()) {
        n_fine = n;
      }
      const int n_coarse = n - n_fine;
      ws.points.resize(3, n);
      targets.resize(n);
      auto draw = [&](const std::vector<SdfSample>& group, int count, int offset) {
        if (full) {
          for (int k = 0; k < count; ++k) {
            const auto& s = group[static_cast<std::size_t>(k)];
            ws.points.col(offset + k) = s.position.cast<float>();
            targets[offset + k] = static_cast<float>(s.distance);
          }
          return;
        }
        std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
        for (int k = 0; k < count; ++k) {
          const auto& s = group[pick(rng)];
          ws.points.col(offset + k) = s.position.cast<float>();
          targets[offset + k] = static_cast<float>(s.distance);
        }
      };
      if (n_fine > 0) draw(set.fine, n_fine, 0);
      if (n_coarse > 0) draw(set.coarse, n_coarse, n_fine);
      ws.latent = latent.cast<float>();

      kernel.forward(ws, levels);
      const Eigen::MatrixXf residual = ws.sdf.rowwise() - targets;
      dsdf.resize(levels, n);
      if (n_fine > 0) {
        dsdf.leftCols(n_fine) = residual.leftCols(n_fine) * float(2.0 * inv_batch / n_fine);
      }
      if (n_coarse > 0) {
        dsdf.rightCols(n_coarse) = residual.rightCols(n_coarse) *
                                   float(2.0 * config.lambda_coarse * inv_batch / n_coarse);
      }
      dlatent = K::Vec::Zero(latent.size());
      kernel.backward(ws, dsdf, &grads, &dlatent);

      double shape_loss = 0.0;
      double coarse_sum = 0.0;
      for (int i = 0; i < levels; ++i) {
        const double fine =
            n_fine > 0 ? double(residual.row(i).head(n_fine).squaredNorm()) / n_fine : 0.0;
        const double coarse =
            n_coarse > 0 ? double(residual.row(i).tail(n_coarse).squaredNorm()) / n_coarse : 0.0;
        row.fine_mse[static_cast<std::size_t>(i)] += fine * inv_batch;
        coarse_sum += coarse;
        shape_loss += fine + config.lambda_coarse * coarse;
      }
      const double reg = config.lambda_reg * latent.squaredNorm();
      row.coarse_mse += coarse_sum / levels * inv_batch;
      row.reg += reg * inv_batch;
      row.loss += (shape_loss + reg) * inv_batch;
      latent_grads.push_back(
          {shape, dlatent.cast<double>() + (2.0 * config.lambda_reg * inv_batch) * latent});
    }

    if (!std::isfinite(row.loss)) {
      throw TrainingError("training diverged at step " + std::to_string(step), step);
    }
    NetworkParams net_grads = params.zeros_like();
    K::accumulate(params, grads, net_grads);
    adam_step(params, codebook, net_grads, latent_grads, adam, lr);
    clamp_frequency_parameters(params);

    if (step % config.history_every == 0 || step + 1 == config.steps) {
      if (progress) progress(row);
      result.history.push_back(std::move(row));
    }
  }
  result.params = std::move(params);
  result.codebook = std::move(codebook);
  return result;
}

void write_history_csv(std::ostream& out, std::span<const HistoryRow> history) {
  const std::size_t heads = history.empty() ? 0 : history.front().fine_mse.size();
  out << "step,lr";
  for (std::size_t i = 1; i <= heads; ++i) out << ",fine_mse_" << i;
  out << ",coarse_mse,reg\n";
  out.precision(9);
  for (const auto& row : history) {
    out << row.step << ',' << row.lr;
    for (double v : row.fine_mse) out << ',' << v;
    out << ',' << row.coarse_mse << ',' << row.reg << '\n';
  }
}

double fit_learning_rate(const FitConfig& config, long step) {
  const long decay_begin = static_cast<long>(std::floor(config.decay_start * double(config.steps)));
  if (step < decay_begin || config.steps - 1 <= decay_begin) return config.lr;
  const double t = double(step - decay_begin) / double(config.steps - 1 - decay_begin);
  return config.lr + (config.lr_final - config.lr) * std::min(t, 1.0);
}

LatentCode fit_latent(const NetworkParams& params, const SdfSampleSet& samples,
                      const FitConfig& config) {
  const int d_l = params.config.latent_dim;
  LatentCode latent = LatentCode::Zero(d_l);
  if (config.steps <= 0) return latent;
  if (samples.size() == 0) throw std::invalid_argument("fit_latent: empty sample set");

  using K = MfnKernel<float>;
  const K kernel(params);
  const int levels = params.levels();
  VectorAdam adam(d_l);
  std::seed_seq seq{config.seed, std::uint64_t{0xF17}};
  std::mt19937_64 rng(seq);

  const bool subsample = config.samples_per_step > 0 &&
                         static_cast<std::size_t>(config.samples_per_step) < samples.size();
  K::Workspace ws;
  Eigen::RowVectorXf targets;
  int n_fine = static_cast<int>(samples.fine.size());
  int n_coarse = static_cast<int>(samples.coarse.size());
  if (!subsample) {
    load_points<float>(samples, ws.points, targets);
  } else {
    const int n = config.samples_per_step;
    if (n_fine > 0 && n_coarse > 0) {
      const double ratio = double(n_fine) / double(samples.size());
      n_fine = std::clamp(static_cast<int>(std::lround(ratio * n)), 1, n - 1);
    } else if (n_fine > 0) {
      n_fine = n;
    } else {
      n_fine = 0;
    }
    n_coarse = n - n_fine;
  }

  Eigen::MatrixXf dsdf;
  K::Vec dlatent;
  for (long step = 0; step < config.steps; ++step) {
    if (subsample) {
      const int n = config.samples_per_step;
      ws.points.resize(3, n);
      targets.resize(n);
      auto draw = [&](const std::vector<SdfSample>& group, int count, int offset) {
        std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
        for (int k = 0; k < count; ++k) {
          const auto& s = group[pick(rng)];
          ws.points.col(offset + k) = s.position.cast<float>();
          targets[offset + k] = static_cast<float>(s.distance);
        }
      };
      if (n_fine > 0) draw(samples.fine, n_fine, 0);
      if (n_coarse > 0) draw(samples.coarse, n_coarse, n_fine);
    }
    ws.latent = latent.cast<float>();
    kernel.forward(ws, levels);
    const Eigen::MatrixXf residual = ws.sdf.rowwise() - targets;
    dsdf.resize(levels, residual.cols());
    if (n_fine > 0) dsdf.leftCols(n_fine) = residual.leftCols(n_fine) * (2.0f / n_fine);
    if (n_coarse > 0) {
      dsdf.rightCols(n_coarse) =
          residual.rightCols(n_coarse) * float(2.0 * config.lambda_coarse / n_coarse);
    }
    dlatent = K::Vec::Zero(d_l);
    kernel.backward(ws, dsdf, nullptr, &dlatent);
    const Eigen::VectorXd grad = dlatent.cast<double>() + 2.0 * config.lambda_reg * latent;
    adam.step(latent, grad, fit_learning_rate(config, step));
  }
  return latent;
}

SdfSampleSet apply_mask(const SdfSampleSet& samples, const SpatialMask& mask) {
  SdfSampleSet out;
  out.shape_id = samples.shape_id;
  for (const auto& s : samples.fine) {
    if (mask(s.position)) out.fine.push_back(s);
  }
  for (const auto& s : samples.coarse) {
    if (mask(s.position)) out.coarse.push_back(s);
  }
  return out;
}

LatentCode fit_latent_masked(const NetworkParams& params, const SdfSampleSet& samples,
                             const SpatialMask& mask, const FitConfig& config) {
  const SdfSampleSet kept = apply_mask(samples, mask);
  if (kept.size() == 0) throw std::invalid_argument("fit_latent_masked: mask removes every sample");
  if (10 * kept.size() < samples.size()) {
    throw std::invalid_argument("fit_latent_masked: mask keeps fewer than 10% of the samples");
  }
  return fit_latent(params, kept, config);
}

}  // namespace lodsdf
