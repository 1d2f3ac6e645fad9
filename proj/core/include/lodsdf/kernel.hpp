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

#include <vector>

#include <Eigen/Core>

#include "lodsdf/network.hpp"

namespace lodsdf {

// Batched forward/backward of the conditional network for a block of points
// that share one latent code. Instantiated for float (training, fitting) and
// double (forward_batch, gradient checks, meshing).
template <class T>
class MfnKernel {
 public:
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  // Gradients with respect to the effective frequencies (not omega_raw).
  struct Gradients {
    std::vector<Mat> omega;
    std::vector<Vec> phi;
    std::vector<Mat> weight;
    std::vector<Vec> bias;
    std::vector<Vec> head_weight;
    std::vector<T> head_bias;

    void set_zero();
  };

  struct Workspace {
    Mat points;  // 3 x B
    Vec latent;
    int max_level = 0;
    std::vector<Mat> pre;  // omega x + phi, per layer
    std::vector<Mat> g;    // sin(pre)
    std::vector<Mat> a;    // W_i z_{i-1} + b_i; a[0] unused
    std::vector<Mat> z;
    Mat sdf;  // max_level x B; row i-1 holds level i
  };

  explicit MfnKernel(const NetworkParams& params);

  const NetworkConfig& config() const { return config_; }
  Gradients make_gradients() const;

  // Runs layers 0..max_level. Throws NumericalError naming the first layer
  // that produces a non-finite activation.
  void forward(Workspace& ws, int max_level, OpCounter* counter = nullptr) const;

  // `dsdf` is max_level x B with dLoss/ds_i in row i-1. Accumulates parameter
  // gradients into `grads` (skipped when null) and latent gradients into
  // `dlatent` (skipped when null).
  void backward(const Workspace& ws, const Mat& dsdf, Gradients* grads, Vec* dlatent) const;

  // Adds `g` into `out`, mapping frequency gradients through
  // omega = tanh(omega_raw) * B.
  static void accumulate(const NetworkParams& params, const Gradients& g, NetworkParams& out);

 private:
  void embedding_backward(const Workspace& ws, int layer, const Mat& dg, Gradients* grads,
                          Vec* dlatent) const;

  NetworkConfig config_;
  std::vector<Mat> omega_;
  std::vector<Vec> phi_;
  std::vector<Mat> weight_;
  std::vector<Vec> bias_;
  std::vector<Vec> head_weight_;
  std::vector<T> head_bias_;
};

extern template class MfnKernel<float>;
extern template class MfnKernel<double>;

}  // namespace lodsdf
