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
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lodsdf/geometry.hpp"

namespace lodsdf {

template <class T>
class MfnKernel;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite value encountered while evaluating the network.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Where the latent code enters the band-limited network.
enum class Conditioning {
  kInputConcat,   // [x | l] goes through the sine embeddings
  kOutputConcat,  // [z_i | l] feeds the output heads only
  kHiddenConcat,  // [g_i(x) | l] multiplies every hidden layer (default)
};

const char* to_string(Conditioning c);
Conditioning conditioning_from_string(std::string_view s);

// Per-layer frequency bounds B_0..B_{N-1} summing to `total`. Weights follow
// the pattern 1 | 2 x g1 | 3 x g2 | 6 x g3 with g1:g2:g3 ~ 4:3:5; for 13 layers
// this gives B/48, 4 x B/24, 3 x B/16, 5 x B/8.
std::vector<double> grouped_bound_schedule(int layers, double total);

struct NetworkConfig {
  int layers = 7;  // N sine embeddings; levels of detail are 1..N-1
  int hidden_dim = 64;
  int latent_dim = 32;
  double bandwidth = 64.0;     // B, angular frequency over the unit domain
  std::vector<double> bounds;  // explicit B_i; empty selects grouped_bound_schedule
  Conditioning conditioning = Conditioning::kHiddenConcat;

  int levels() const { return layers - 1; }
  // Width of z_i.
  int width() const;
  // Input width of the output heads.
  int head_dim() const;
  // Columns of each frequency matrix (3, or 3 + latent_dim for input concat).
  int embed_input_dim() const;

  // Validated per-layer bounds. Throws ConfigError.
  std::vector<double> resolved_bounds() const;
  void validate() const;
};

struct FrequencyLayer {
  Eigen::MatrixXd omega_raw;  // hidden_dim x embed_input_dim, unconstrained
  Eigen::VectorXd phi;        // hidden_dim
  double bound = 0.0;         // B_i

  // Effective frequencies tanh(omega_raw) * bound, strictly inside (-bound, bound).
  Eigen::MatrixXd omega() const;
};

struct HiddenLayer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

struct OutputHead {
  Eigen::VectorXd weight;  // row vector stored as a column
  double bias = 0.0;
};

// All learnable tensors of the conditional network.
struct NetworkParams {
  NetworkConfig config;
  std::vector<FrequencyLayer> frequency;  // layers 0..N-1
  std::vector<HiddenLayer> hidden;        // hidden[i - 1] is layer i
  std::vector<OutputHead> heads;          // heads[i - 1] is level i

  int levels() const { return config.levels(); }
  // Upper bound on the spatial bandwidth of level i: sum_{j <= i} B_j.
  double cumulative_bound(int level) const;
  // Same shapes, every entry zero.
  NetworkParams zeros_like() const;
};

using LatentCode = Eigen::VectorXd;

// Largest |omega_raw| kept after optimizer steps; tanh(12) < 1 in double.
inline constexpr double kMaxRawFrequency = 12.0;

// omega_raw ~ atanh(U(-1, 1)) so that the effective frequencies are uniform in
// [-B_i, B_i]; phi ~ U(-pi, pi); linear layers and heads ~ U(+-1/sqrt(fan_in)).
NetworkParams init_network(const NetworkConfig& config, std::uint64_t seed);

// Clamps omega_raw into [-kMaxRawFrequency, kMaxRawFrequency].
void clamp_frequency_parameters(NetworkParams& params);

// Calls f(name, span) for every tensor in checkpoint order: per frequency layer
// omega_raw then phi; per hidden layer weight then bias; per head weight then
// bias. Matrices are visited in Eigen's column-major storage order.
template <class Params, class F>
void for_each_tensor(Params& params, F&& f) {
  for (std::size_t i = 0; i < params.frequency.size(); ++i) {
    auto& layer = params.frequency[i];
    const auto n = std::to_string(i);
    f("frequency" + n + ".omega_raw",
      std::span(layer.omega_raw.data(), static_cast<std::size_t>(layer.omega_raw.size())));
    f("frequency" + n + ".phi",
      std::span(layer.phi.data(), static_cast<std::size_t>(layer.phi.size())));
  }
  for (std::size_t i = 0; i < params.hidden.size(); ++i) {
    auto& layer = params.hidden[i];
    const auto n = std::to_string(i + 1);
    f("hidden" + n + ".weight",
      std::span(layer.weight.data(), static_cast<std::size_t>(layer.weight.size())));
    f("hidden" + n + ".bias",
      std::span(layer.bias.data(), static_cast<std::size_t>(layer.bias.size())));
  }
  for (std::size_t i = 0; i < params.heads.size(); ++i) {
    auto& head = params.heads[i];
    const auto n = std::to_string(i + 1);
    f("head" + n + ".weight",
      std::span(head.weight.data(), static_cast<std::size_t>(head.weight.size())));
    f("head" + n + ".bias", std::span(&head.bias, 1));
  }
}

// g(x) = sin(omega * input + phi) for an arbitrary input vector.
Eigen::VectorXd embed(const FrequencyLayer& layer, const Eigen::VectorXd& input);
Eigen::VectorXd embed(const FrequencyLayer& layer, const Vec3& x);

struct ForwardTrace {
  std::vector<double> sdf;                   // sdf[i - 1] is level i
  std::vector<Eigen::VectorXd> activations;  // z_0..z_{N-1}

  double level(int i) const { return sdf.at(static_cast<std::size_t>(i - 1)); }
};

// Per-point evaluation of every level. This is the straightforward reference
// path; forward_batch and the training kernel are checked against it.
ForwardTrace forward_all(const NetworkParams& params, const Vec3& x, const LatentCode& latent);

// Columns processed per layer, used to check level truncation.
struct OpCounter {
  std::vector<std::size_t> layer_columns;  // index = layer 0..N-1
};

// Batched evaluation of a single level; layers above `level` are never run.
// Throws std::out_of_range for level outside [1, N-1].
std::vector<double> forward_batch(const NetworkParams& params, std::span<const Vec3> xs,
                                  const LatentCode& latent, int level,
                                  OpCounter* counter = nullptr);

// Plain (latent-free) band-limited network of width d_h + d_l.
struct UnconditionalParams {
  std::vector<Eigen::MatrixXd> omega;  // effective frequencies, width x 3
  std::vector<Eigen::VectorXd> phi;
  std::vector<HiddenLayer> hidden;
  std::vector<OutputHead> heads;
  double alpha = 0.0;  // max |l|

  int levels() const { return static_cast<int>(heads.size()); }
};

// Rewrites a hidden-concat network with a fixed latent as an unconditional
// network: omega' = [omega | 0], phi' = [phi | asin(l / alpha)], and the last
// d_l columns of every W and W_out scaled by alpha = max |l|.
UnconditionalParams collapse_latent(const NetworkParams& params, const LatentCode& latent);

double forward_unconditional(const UnconditionalParams& params, const Vec3& x, int level);

// Batch SDF callback used by meshing: fills out[k] with f(points[k]).
class NetworkField {
 public:
  NetworkField(const NetworkParams& params, LatentCode latent, int level);

  void operator()(std::span<const Vec3> points, std::span<double> out) const;

  int level() const { return level_; }
  const LatentCode& latent() const { return latent_; }

 private:
  std::shared_ptr<const MfnKernel<double>> kernel_;
  LatentCode latent_;
  int level_;
};

}  // namespace lodsdf
