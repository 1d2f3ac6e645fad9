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
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "lodsdf/metrics.hpp"

namespace lodsdf {
namespace {

void check_pair(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.size() != b.size()) throw std::invalid_argument("emd: point sets differ in size");
  if (a.empty()) throw std::invalid_argument("emd: empty point set");
}

Eigen::MatrixXd distance_matrix(std::span<const Vec3> a, std::span<const Vec3> b) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) c(i, j) = (a[std::size_t(i)] - b[std::size_t(j)]).norm();
  }
  return c;
}

// Log-sum-exp of v / eps.
double log_sum_exp(const Eigen::ArrayXd& v, double eps) {
  const double m = v.maxCoeff();
  return m / eps + std::log(((v - m) / eps).exp().sum());
}

}  // namespace

double emd_exact(std::span<const Vec3> a, std::span<const Vec3> b) {
  check_pair(a, b);
  const Eigen::MatrixXd cost = distance_matrix(a, b);
  const int n = static_cast<int>(a.size());
  // Shortest augmenting path assignment with potentials, 1-based rows/cols.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(std::size_t(n) + 1, 0.0), v(std::size_t(n) + 1, 0.0);
  std::vector<int> match(std::size_t(n) + 1, 0), way(std::size_t(n) + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(std::size_t(n) + 1, inf);
    std::vector<char> used(std::size_t(n) + 1, 0);
    do {
      used[std::size_t(col0)] = 1;
      const int i0 = match[std::size_t(col0)];
      double delta = inf;
      int col1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[std::size_t(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[std::size_t(i0)] - v[std::size_t(j)];
        if (cur < minv[std::size_t(j)]) {
          minv[std::size_t(j)] = cur;
          way[std::size_t(j)] = col0;
        }
        if (minv[std::size_t(j)] < delta) {
          delta = minv[std::size_t(j)];
          col1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[std::size_t(j)]) {
          u[std::size_t(match[std::size_t(j)])] += delta;
          v[std::size_t(j)] -= delta;
        } else {
          minv[std::size_t(j)] -= delta;
        }
      }
      col0 = col1;
    } while (match[std::size_t(col0)] != 0);
    do {
      const int col1 = way[std::size_t(col0)];
      match[std::size_t(col0)] = match[std::size_t(col1)];
      col0 = col1;
    } while (col0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(match[std::size_t(j)] - 1, j - 1);
  return total / n * 1e4;
}

double emd_sinkhorn(std::span<const Vec3> a, std::span<const Vec3> b,
                    const SinkhornConfig& config) {
  check_pair(a, b);
  if (config.iterations < 1 || !(config.epsilon_end > 0.0) ||
      config.epsilon_start < config.epsilon_end) {
    throw std::invalid_argument("emd_sinkhorn: bad schedule");
  }
  const Eigen::MatrixXd cost = distance_matrix(a, b);
  const Eigen::MatrixXd cost_t = cost.transpose();
  const auto n = cost.rows();
  const double log_n = std::log(double(n));
  Eigen::ArrayXd f = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd g = Eigen::ArrayXd::Zero(n);
  double eps = config.epsilon_start;
  const double decay = config.iterations > 1
                           ? std::pow(config.epsilon_end / config.epsilon_start,
                                      1.0 / double(config.iterations - 1))
                           : 1.0;
  for (int it = 0; it < config.iterations; ++it) {
    if (it + 1 == config.iterations) eps = config.epsilon_end;
    for (Eigen::Index i = 0; i < n; ++i) {
      f[i] = eps * log_n - eps * log_sum_exp(g - cost_t.col(i).array(), eps);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      g[j] = eps * log_n - eps * log_sum_exp(f - cost.col(j).array(), eps);
    }
    eps *= decay;
  }
  eps = config.epsilon_end;
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::ArrayXd plan =
        ((f + g[j] - cost.col(j).array()) / eps - 2.0 * log_n).exp();
    total += (plan * cost.col(j).array()).sum();
  }
  return total * 1e4;
}

EmdResult emd(std::span<const Vec3> a, std::span<const Vec3> b, std::size_t exact_limit) {
  check_pair(a, b);
  if (a.size() <= exact_limit) return {emd_exact(a, b), false};
  return {emd_sinkhorn(a, b), true};
}

}  // namespace lodsdf
