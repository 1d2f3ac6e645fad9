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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lodsdf/meshing.hpp"
#include "mc_core.hpp"

namespace lodsdf {
namespace {

constexpr std::size_t kEvalBatch = 16384;

detail::Lattice finest_lattice(int resolution) {
  const std::int64_t n = resolution + 1;
  return {{n, n, n}, Vec3::Constant(-kExtractionHalfExtent),
          2.0 * kExtractionHalfExtent / resolution};
}

// Evaluates `keys` (sorted) in batches and stores the results.
std::uint64_t evaluate_corners(const BatchSdf& sdf, const detail::Lattice& lattice,
                               const std::vector<std::uint64_t>& keys,
                               std::unordered_map<std::uint64_t, double>& values) {
  std::vector<Vec3> points;
  std::vector<double> out;
  for (std::size_t begin = 0; begin < keys.size(); begin += kEvalBatch) {
    const std::size_t n = std::min(kEvalBatch, keys.size() - begin);
    points.resize(n);
    out.assign(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) points[p] = lattice.position(keys[begin + p]);
    sdf(points, out);
    for (std::size_t p = 0; p < n; ++p) {
      if (!std::isfinite(out[p])) {
        throw NumericalError("non-finite SDF value during extraction");
      }
      values[keys[begin + p]] = out[p];
    }
  }
  return keys.size();
}

void sort_unique(std::vector<std::uint64_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void check_network_level(const NetworkParams& params, int level) {
  if (level < 1 || level >= params.config.layers) {
    throw std::out_of_range("level " + std::to_string(level) + " outside [1, " +
                            std::to_string(params.config.layers - 1) + "]");
  }
}

}  // namespace

void MeshingConfig::validate() const {
  if (base_resolution < 1) throw ConfigError("meshing.base_resolution must be >= 1");
  if (target_resolution < base_resolution || target_resolution % base_resolution != 0) {
    throw ConfigError("meshing.target_resolution must be a multiple of base_resolution");
  }
  const int ratio = target_resolution / base_resolution;
  if ((ratio & (ratio - 1)) != 0) {
    throw ConfigError("meshing: target/base resolution must be a power of 2");
  }
  if (!(subdivision_factor >= 1.0)) throw ConfigError("meshing.subdivision_factor must be >= 1");
  if (std::isnan(reuse_threshold)) throw ConfigError("meshing.reuse_threshold is NaN");
  if (!std::isfinite(iso)) throw ConfigError("meshing.iso must be finite");
}

double MeshingConfig::finest_spacing() const {
  return 2.0 * kExtractionHalfExtent / target_resolution;
}

double MeshingConfig::finest_diagonal() const { return std::sqrt(3.0) * finest_spacing(); }

double MeshingConfig::resolved_reuse_threshold() const {
  return reuse_threshold > 0.0 ? reuse_threshold : 2.0 * finest_diagonal();
}

nlohmann::json EvalStats::to_json() const {
  return {{"evals", evaluations}, {"cells_per_level", cells_per_level}, {"reused", reused}};
}

Extraction extract_mesh(const BatchSdf& sdf, const MeshingConfig& config) {
  config.validate();
  const int resolution = config.target_resolution;
  const auto lattice = finest_lattice(resolution);
  Extraction result;
  result.grid.resolution = resolution;
  auto& values = result.grid.corner_values;

  std::int64_t stride = resolution / config.base_resolution;
  std::vector<std::uint64_t> cells;
  std::vector<std::uint64_t> corners;
  for (std::int64_t k = 0; k <= resolution; k += stride) {
    for (std::int64_t j = 0; j <= resolution; j += stride) {
      for (std::int64_t i = 0; i <= resolution; i += stride) {
        corners.push_back(lattice.key(i, j, k));
        if (i < resolution && j < resolution && k < resolution) {
          cells.push_back(lattice.key(i, j, k));
        }
      }
    }
  }
  values.reserve(corners.size() * 4);
  result.stats.evaluations += evaluate_corners(sdf, lattice, corners, values);

  while (true) {
    result.stats.cells_per_level.push_back(cells.size());
    if (stride == 1) break;
    const double limit =
        config.subdivision_factor * std::sqrt(3.0) * lattice.spacing * double(stride);
    const std::int64_t half = stride / 2;
    std::vector<std::uint64_t> children;
    corners.clear();
    for (const std::uint64_t cell : cells) {
      double nearest = std::numeric_limits<double>::infinity();
      for (int c = 0; c < 8; ++c) {
        const auto& o = detail::kCornerOffsets[static_cast<std::size_t>(c)];
        const auto key = cell + lattice.key(o[0] * stride, o[1] * stride, o[2] * stride);
        nearest = std::min(nearest, std::abs(values.at(key) - config.iso));
      }
      if (nearest > limit) continue;
      for (int dz = 0; dz <= 2; ++dz) {
        for (int dy = 0; dy <= 2; ++dy) {
          for (int dx = 0; dx <= 2; ++dx) {
            const auto key = cell + lattice.key(dx * half, dy * half, dz * half);
            if (dx < 2 && dy < 2 && dz < 2) children.push_back(key);
            if (!values.contains(key)) corners.push_back(key);
          }
        }
      }
    }
    sort_unique(corners);
    result.stats.evaluations += evaluate_corners(sdf, lattice, corners, values);
    std::sort(children.begin(), children.end());
    cells = std::move(children);
    stride = half;
  }

  result.mesh = detail::polygonize(
      lattice, cells, [&](std::uint64_t key) { return values.at(key); }, config.iso);
  result.grid.finest_cells = std::move(cells);
  return result;
}

Extraction refine_mesh(const BatchSdf& sdf, const OctreeGrid& cached, const MeshingConfig& config) {
  config.validate();
  if (cached.empty()) throw std::invalid_argument("refine_mesh: missing cached grid");
  if (cached.resolution != config.target_resolution) {
    throw std::invalid_argument("refine_mesh: cached grid has resolution " +
                                std::to_string(cached.resolution) + ", expected " +
                                std::to_string(config.target_resolution));
  }
  const auto lattice = finest_lattice(config.target_resolution);
  const double tau = config.resolved_reuse_threshold();

  Extraction result;
  result.grid.resolution = cached.resolution;
  result.grid.finest_cells = cached.finest_cells;
  auto& values = result.grid.corner_values;

  std::vector<std::uint64_t> corners;
  corners.reserve(cached.finest_cells.size() * 8);
  for (const std::uint64_t cell : cached.finest_cells) {
    for (int c = 0; c < 8; ++c) corners.push_back(lattice.corner(cell, c));
  }
  sort_unique(corners);
  std::vector<std::uint64_t> stale;
  for (const std::uint64_t key : corners) {
    const auto it = cached.corner_values.find(key);
    if (it == cached.corner_values.end()) {
      throw std::invalid_argument("refine_mesh: cached grid lacks a corner value");
    }
    if (std::abs(it->second - config.iso) < tau) {
      stale.push_back(key);
    } else {
      values.emplace(key, it->second);
      ++result.stats.reused;
    }
  }
  result.stats.evaluations = evaluate_corners(sdf, lattice, stale, values);
  result.stats.cells_per_level.push_back(cached.finest_cells.size());
  result.mesh = detail::polygonize(
      lattice, result.grid.finest_cells, [&](std::uint64_t key) { return values.at(key); },
      config.iso);
  return result;
}

Extraction extract_level(const NetworkParams& params, const LatentCode& latent, int level,
                         const MeshingConfig& config) {
  check_network_level(params, level);
  Extraction result = extract_mesh(make_batch_sdf(NetworkField(params, latent, level)), config);
  result.grid.level = level;
  return result;
}

Extraction refine_level(const NetworkParams& params, const LatentCode& latent, int from_level,
                        int to_level, const OctreeGrid& cached, const MeshingConfig& config) {
  check_network_level(params, from_level);
  check_network_level(params, to_level);
  if (to_level <= from_level) {
    throw std::invalid_argument("refine: target level must be above the cached level");
  }
  if (cached.level != from_level) {
    throw std::invalid_argument("refine: cache holds level " + std::to_string(cached.level) +
                                ", expected " + std::to_string(from_level));
  }
  Extraction result =
      refine_mesh(make_batch_sdf(NetworkField(params, latent, to_level)), cached, config);
  result.grid.level = to_level;
  return result;
}

}  // namespace lodsdf
