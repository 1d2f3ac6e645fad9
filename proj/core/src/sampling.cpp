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

#include "lodsdf/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "lodsdf/analytic_shape.hpp"
#include "lodsdf/mesh_sdf.hpp"

namespace lodsdf {
namespace {

Vec3 central_gradient(const SdfFunction& f, const Vec3& x) {
  constexpr double h = 1e-6;
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 dx = Vec3::Zero();
    dx[a] = h;
    g[a] = (f(x + dx) - f(x - dx)) / (2.0 * h);
  }
  return g;
}

// Newton-style projection x <- x - f(x) grad f / |grad f|^2 from uniform seeds.
std::vector<Vec3> project_to_zero_set(const SdfFunction& f, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-0.55, 0.55);
  std::vector<Vec3> out;
  out.reserve(n);
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > 100 * n + 1000) {
      throw GeometryError("surface projection failed: field has no reachable zero set");
    }
    Vec3 x(box(rng), box(rng), box(rng));
    bool converged = false;
    for (int it = 0; it < 32; ++it) {
      const double s = f(x);
      if (std::abs(s) < 1e-10) {
        converged = true;
        break;
      }
      const Vec3 g = central_gradient(f, x);
      const double g2 = g.squaredNorm();
      if (g2 < 1e-12) break;
      x -= (s / g2) * g;
    }
    if (converged) out.push_back(x);
  }
  return out;
}

}  // namespace

SdfOracle make_oracle(const AnalyticShape& shape) {
  SdfFunction f = [shape](const Vec3& x) { return shape(x); };
  SurfaceSampler surface = [f](std::size_t n, std::uint64_t seed) {
    return project_to_zero_set(f, n, seed);
  };
  return {f, surface};
}

SdfOracle make_oracle(std::shared_ptr<const MeshSdf> mesh) {
  SdfFunction f = [mesh](const Vec3& x) { return (*mesh)(x); };
  SurfaceSampler surface = [mesh](std::size_t n, std::uint64_t seed) {
    return sample_surface_points(mesh->mesh(), n, seed);
  };
  return {f, surface};
}

SdfSampleSet sample_training_set(const SdfOracle& oracle, const SamplingConfig& config,
                                 std::uint64_t seed) {
  if (config.total < 20) throw std::invalid_argument("sample_training_set: total must be >= 20");
  if (!(config.fine_fraction > 0.0 && config.fine_fraction < 1.0)) {
    throw std::invalid_argument("sample_training_set: fine_fraction must lie in (0, 1)");
  }
  const std::size_t n_uniform =
      static_cast<std::size_t>(std::llround(config.uniform_fraction * double(config.total)));
  const std::size_t n_surface = config.total - n_uniform;
  const std::size_t n_near = n_surface / 2;

  // Independent streams for the surface sampler and the perturbations.
  std::seed_seq seq{seed, std::uint64_t{0x5DF5}};
  std::mt19937_64 rng(seq);
  const std::uint64_t surface_seed = rng();
  const auto surface = oracle.surface(n_surface, surface_seed);

  // Offsets are relative to the unit domain extent.
  constexpr double kDomainExtent = 1.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-config.uniform_half_extent,
                                                 config.uniform_half_extent);
  std::vector<SdfSample> all;
  all.reserve(config.total);
  for (std::size_t k = 0; k < n_surface; ++k) {
    const double sigma = (k < n_near ? config.near_sigma : config.far_sigma) * kDomainExtent;
    const Vec3 noise(normal(rng), normal(rng), normal(rng));
    all.push_back({surface[k] + sigma * noise, 0.0});
  }
  for (std::size_t k = 0; k < n_uniform; ++k) {
    all.push_back({Vec3(uniform(rng), uniform(rng), uniform(rng)), 0.0});
  }
  for (auto& s : all) s.distance = oracle.distance(s.position);

  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(all[a].distance) < std::abs(all[b].distance);
  });
  const auto n_fine =
      static_cast<std::size_t>(std::llround(config.fine_fraction * double(config.total)));

  SdfSampleSet out;
  out.fine.reserve(n_fine);
  out.coarse.reserve(all.size() - n_fine);
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < n_fine ? out.fine : out.coarse).push_back(all[order[k]]);
  }
  return out;
}

}  // namespace lodsdf
