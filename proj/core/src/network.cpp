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

#include "lodsdf/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "lodsdf/kernel.hpp"

namespace lodsdf {

const char* to_string(Conditioning c) {
  switch (c) {
    case Conditioning::kInputConcat: return "input_concat";
    case Conditioning::kOutputConcat: return "output_concat";
    case Conditioning::kHiddenConcat: return "hidden_concat";
  }
  return "unknown";
}

Conditioning conditioning_from_string(std::string_view s) {
  if (s == "input_concat" || s == "design1") return Conditioning::kInputConcat;
  if (s == "output_concat" || s == "design2") return Conditioning::kOutputConcat;
  if (s == "hidden_concat" || s == "design3") return Conditioning::kHiddenConcat;
  throw ConfigError("unknown conditioning '" + std::string(s) + "'");
}

std::vector<double> grouped_bound_schedule(int layers, double total) {
  if (layers < 2) throw ConfigError("bound schedule needs at least 2 layers");
  const int rest = layers - 1;
  const int g1 = static_cast<int>(std::lround(rest * 4.0 / 12.0));
  const int g2 = std::min(rest - g1, static_cast<int>(std::lround(rest * 3.0 / 12.0)));
  const int g3 = rest - g1 - g2;
  std::vector<double> weights{1.0};
  weights.insert(weights.end(), static_cast<std::size_t>(g1), 2.0);
  weights.insert(weights.end(), static_cast<std::size_t>(g2), 3.0);
  weights.insert(weights.end(), static_cast<std::size_t>(g3), 6.0);
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> bounds;
  bounds.reserve(weights.size());
  for (double w : weights) bounds.push_back(total * w / sum);
  return bounds;
}

int NetworkConfig::width() const {
  return conditioning == Conditioning::kHiddenConcat ? hidden_dim + latent_dim : hidden_dim;
}

int NetworkConfig::head_dim() const {
  return conditioning == Conditioning::kInputConcat ? hidden_dim : hidden_dim + latent_dim;
}

int NetworkConfig::embed_input_dim() const {
  return conditioning == Conditioning::kInputConcat ? 3 + latent_dim : 3;
}

std::vector<double> NetworkConfig::resolved_bounds() const {
  if (layers < 2) throw ConfigError("network needs at least 2 layers (N >= 2)");
  if (hidden_dim < 1) throw ConfigError("hidden_dim must be positive");
  if (latent_dim < 1) throw ConfigError("latent_dim must be positive");
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  std::vector<double> b = bounds.empty() ? grouped_bound_schedule(layers, bandwidth) : bounds;
  if (static_cast<int>(b.size()) != layers) {
    throw ConfigError("bound schedule has " + std::to_string(b.size()) + " entries but N=" +
                      std::to_string(layers));
  }
  if (std::any_of(b.begin(), b.end(), [](double v) { return !(v > 0.0); })) {
    throw ConfigError("every layer bound must be positive");
  }
  const double sum = std::accumulate(b.begin(), b.end(), 0.0);
  if (std::abs(sum - bandwidth) > 1e-9 * bandwidth) {
    throw ConfigError("bound schedule sums to " + std::to_string(sum) + ", expected bandwidth " +
                      std::to_string(bandwidth));
  }
  return b;
}

void NetworkConfig::validate() const { (void)resolved_bounds(); }

Eigen::MatrixXd FrequencyLayer::omega() const { return omega_raw.array().tanh() * bound; }

double NetworkParams::cumulative_bound(int level) const {
  double sum = 0.0;
  for (int j = 0; j <= level && j < static_cast<int>(frequency.size()); ++j) {
    sum += frequency[static_cast<std::size_t>(j)].bound;
  }
  return sum;
}

NetworkParams NetworkParams::zeros_like() const {
  NetworkParams z = *this;
  for_each_tensor(z, [](const std::string&, std::span<double> t) {
    std::fill(t.begin(), t.end(), 0.0);
  });
  return z;
}

NetworkParams init_network(const NetworkConfig& config, std::uint64_t seed) {
  const auto bounds = config.resolved_bounds();
  NetworkParams p;
  p.config = config;
  p.config.bounds = bounds;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  constexpr double kClamp = 1.0 - 1e-6;

  const int d_h = config.hidden_dim;
  for (int i = 0; i < config.layers; ++i) {
    FrequencyLayer layer;
    layer.bound = bounds[static_cast<std::size_t>(i)];
    layer.omega_raw.resize(d_h, config.embed_input_dim());
    for (Eigen::Index k = 0; k < layer.omega_raw.size(); ++k) {
      const double u = unit(rng) * layer.bound;
      layer.omega_raw.data()[k] = std::atanh(std::clamp(u / layer.bound, -kClamp, kClamp));
    }
    layer.phi.resize(d_h);
    for (Eigen::Index k = 0; k < d_h; ++k) layer.phi[k] = unit(rng) * std::numbers::pi;
    p.frequency.push_back(std::move(layer));
  }

  const int w = config.width();
  const double hidden_scale = 1.0 / std::sqrt(static_cast<double>(w));
  for (int i = 1; i < config.layers; ++i) {
    HiddenLayer layer;
    layer.weight.resize(w, w);
    for (Eigen::Index k = 0; k < layer.weight.size(); ++k) {
      layer.weight.data()[k] = unit(rng) * hidden_scale;
    }
    layer.bias.resize(w);
    for (Eigen::Index k = 0; k < w; ++k) layer.bias[k] = unit(rng) * hidden_scale;
    p.hidden.push_back(std::move(layer));
  }

  const int hd = config.head_dim();
  const double head_scale = 1.0 / std::sqrt(static_cast<double>(hd));
  for (int i = 1; i < config.layers; ++i) {
    OutputHead head;
    head.weight.resize(hd);
    for (Eigen::Index k = 0; k < hd; ++k) head.weight[k] = unit(rng) * head_scale;
    head.bias = unit(rng) * head_scale;
    p.heads.push_back(std::move(head));
  }
  return p;
}

void clamp_frequency_parameters(NetworkParams& params) {
  for (auto& layer : params.frequency) {
    layer.omega_raw = layer.omega_raw.cwiseMax(-kMaxRawFrequency).cwiseMin(kMaxRawFrequency);
  }
}

Eigen::VectorXd embed(const FrequencyLayer& layer, const Eigen::VectorXd& input) {
  if (input.size() != layer.omega_raw.cols()) {
    throw std::invalid_argument("embed: input has " + std::to_string(input.size()) +
                                " entries, layer expects " +
                                std::to_string(layer.omega_raw.cols()));
  }
  return (layer.omega() * input + layer.phi).array().sin().matrix();
}

Eigen::VectorXd embed(const FrequencyLayer& layer, const Vec3& x) {
  return embed(layer, Eigen::VectorXd(x));
}

ForwardTrace forward_all(const NetworkParams& params, const Vec3& x, const LatentCode& latent) {
  const auto& cfg = params.config;
  if (latent.size() != cfg.latent_dim) {
    throw std::invalid_argument("latent has " + std::to_string(latent.size()) +
                                " entries, network expects " + std::to_string(cfg.latent_dim));
  }
  const auto design = cfg.conditioning;
  Eigen::VectorXd input(cfg.embed_input_dim());
  input.head(3) = x;
  if (design == Conditioning::kInputConcat) input.tail(cfg.latent_dim) = latent;

  auto embedding = [&](int i) {
    Eigen::VectorXd g = embed(params.frequency[static_cast<std::size_t>(i)], input);
    if (design != Conditioning::kHiddenConcat) return g;
    Eigen::VectorXd e(cfg.hidden_dim + cfg.latent_dim);
    e << g, latent;
    return e;
  };

  ForwardTrace trace;
  trace.activations.push_back(embedding(0));
  for (int i = 1; i < cfg.layers; ++i) {
    const auto& layer = params.hidden[static_cast<std::size_t>(i - 1)];
    const Eigen::VectorXd a = layer.weight * trace.activations.back() + layer.bias;
    trace.activations.push_back(embedding(i).cwiseProduct(a));
    const auto& head = params.heads[static_cast<std::size_t>(i - 1)];
    const auto& z = trace.activations.back();
    if (design == Conditioning::kOutputConcat) {
      Eigen::VectorXd zl(cfg.hidden_dim + cfg.latent_dim);
      zl << z, latent;
      trace.sdf.push_back(head.weight.dot(zl) + head.bias);
    } else {
      trace.sdf.push_back(head.weight.dot(z) + head.bias);
    }
  }
  return trace;
}

std::vector<double> forward_batch(const NetworkParams& params, std::span<const Vec3> xs,
                                  const LatentCode& latent, int level, OpCounter* counter) {
  if (level < 1 || level > params.levels()) {
    throw std::out_of_range("level " + std::to_string(level) + " outside [1, " +
                            std::to_string(params.levels()) + "]");
  }
  std::vector<double> out(xs.size());
  const MfnKernel<double> kernel(params);
  MfnKernel<double>::Workspace ws;
  ws.latent = latent;
  constexpr std::size_t kChunk = 4096;
  for (std::size_t begin = 0; begin < xs.size(); begin += kChunk) {
    const std::size_t n = std::min(kChunk, xs.size() - begin);
    ws.points.resize(3, static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) ws.points.col(static_cast<Eigen::Index>(k)) = xs[begin + k];
    kernel.forward(ws, level, counter);
    for (std::size_t k = 0; k < n; ++k) {
      out[begin + k] = ws.sdf(level - 1, static_cast<Eigen::Index>(k));
    }
  }
  return out;
}

UnconditionalParams collapse_latent(const NetworkParams& params, const LatentCode& latent) {
  const auto& cfg = params.config;
  if (cfg.conditioning != Conditioning::kHiddenConcat) {
    throw std::invalid_argument("collapse_latent requires hidden-concat conditioning");
  }
  if (latent.size() != cfg.latent_dim) throw std::invalid_argument("collapse_latent: latent size");
  const Eigen::Index d_h = cfg.hidden_dim;
  const Eigen::Index d_l = cfg.latent_dim;

  UnconditionalParams u;
  u.alpha = latent.cwiseAbs().maxCoeff();
  Eigen::VectorXd latent_phase = Eigen::VectorXd::Zero(d_l);
  if (u.alpha > 0.0) {
    latent_phase = (latent / u.alpha).cwiseMax(-1.0).cwiseMin(1.0).array().asin().matrix();
  }
  for (const auto& layer : params.frequency) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(d_h + d_l, 3);
    omega.topRows(d_h) = layer.omega();
    Eigen::VectorXd phi(d_h + d_l);
    phi << layer.phi, latent_phase;
    u.omega.push_back(std::move(omega));
    u.phi.push_back(std::move(phi));
  }
  for (const auto& layer : params.hidden) {
    HiddenLayer h = layer;
    h.weight.rightCols(d_l) *= u.alpha;
    u.hidden.push_back(std::move(h));
  }
  for (const auto& head : params.heads) {
    OutputHead h = head;
    h.weight.tail(d_l) *= u.alpha;
    u.heads.push_back(std::move(h));
  }
  return u;
}

double forward_unconditional(const UnconditionalParams& params, const Vec3& x, int level) {
  if (level < 1 || level > params.levels()) {
    throw std::out_of_range("level " + std::to_string(level) + " outside [1, " +
                            std::to_string(params.levels()) + "]");
  }
  auto g = [&](int i) -> Eigen::VectorXd {
    const auto ui = static_cast<std::size_t>(i);
    return (params.omega[ui] * x + params.phi[ui]).array().sin().matrix();
  };
  Eigen::VectorXd z = g(0);
  for (int i = 1; i <= level; ++i) {
    const auto& layer = params.hidden[static_cast<std::size_t>(i - 1)];
    z = g(i).cwiseProduct(layer.weight * z + layer.bias);
  }
  const auto& head = params.heads[static_cast<std::size_t>(level - 1)];
  return head.weight.dot(z) + head.bias;
}

NetworkField::NetworkField(const NetworkParams& params, LatentCode latent, int level)
    : kernel_(std::make_shared<const MfnKernel<double>>(params)),
      latent_(std::move(latent)),
      level_(level) {
  if (level < 1 || level > params.levels()) {
    throw std::out_of_range("level " + std::to_string(level) + " outside [1, " +
                            std::to_string(params.levels()) + "]");
  }
  if (latent_.size() != params.config.latent_dim) {
    throw std::invalid_argument("latent size does not match the network");
  }
}

void NetworkField::operator()(std::span<const Vec3> points, std::span<double> out) const {
  MfnKernel<double>::Workspace ws;
  ws.latent = latent_;
  constexpr std::size_t kChunk = 4096;
  for (std::size_t begin = 0; begin < points.size(); begin += kChunk) {
    const std::size_t n = std::min(kChunk, points.size() - begin);
    ws.points.resize(3, static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      ws.points.col(static_cast<Eigen::Index>(k)) = points[begin + k];
    }
    kernel_->forward(ws, level_);
    for (std::size_t k = 0; k < n; ++k) {
      out[begin + k] = ws.sdf(level_ - 1, static_cast<Eigen::Index>(k));
    }
  }
}

}  // namespace lodsdf
