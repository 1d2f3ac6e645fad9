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
#include <span>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "lodsdf/geometry.hpp"
#include "lodsdf/network.hpp"
#include "lodsdf/sampling.hpp"

namespace lodsdf {

// Half extent of the cubic extraction box centered at the origin.
inline constexpr double kExtractionHalfExtent = 0.55;

// Evaluates an SDF at a batch of points; out.size() == points.size().
using BatchSdf = std::function<void(std::span<const Vec3> points, std::span<double> out)>;

BatchSdf make_batch_sdf(SdfFunction f);
BatchSdf make_batch_sdf(const NetworkField& field);

// Corner values of a regular grid with (nx, ny, nz) points per axis, x fastest.
struct ScalarGrid {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  Vec3 origin = Vec3::Zero();
  double spacing = 1.0;
  std::vector<double> values;

  double at(int i, int j, int k) const {
    return values[static_cast<std::size_t>(i + nx * (j + ny * k))];
  }
};

// Standard 256-case marching cubes over every cell. A vertex sits on each
// crossing edge at the linear interpolation of its corner values; vertices of
// shared edges are merged. Corners exactly at `iso` are treated as iso + 1e-9.
// Throws std::invalid_argument when the grid has fewer than 2 points per axis
// or the value count does not match.
TriangleMesh marching_cubes(const ScalarGrid& grid, double iso = 0.0);

struct MeshingConfig {
  int base_resolution = 32;
  int target_resolution = 256;
  double subdivision_factor = 3.0;  // keep cells with min |s| <= factor * diagonal
  double reuse_threshold = 0.0;     // <= 0 means 2x the finest cell diagonal
  double iso = 0.0;

  void validate() const;
  double finest_spacing() const;
  double finest_diagonal() const;
  double resolved_reuse_threshold() const;
};

struct EvalStats {
  std::uint64_t evaluations = 0;
  std::vector<std::uint64_t> cells_per_level;  // cells visited, coarse to fine
  std::uint64_t reused = 0;                    // cached corner values kept by refinement

  nlohmann::json to_json() const;
};

// Sparse octree state kept after an extraction so a later refinement can
// reuse it. Cell and corner keys are linear indices on the finest grid.
struct OctreeGrid {
  int resolution = 0;  // finest resolution
  int level = 0;       // network level the values came from, 0 if unknown
  std::vector<std::uint64_t> finest_cells;  // sorted min-corner keys
  std::unordered_map<std::uint64_t, double> corner_values;

  bool empty() const { return finest_cells.empty() && corner_values.empty(); }
};

struct Extraction {
  TriangleMesh mesh;
  EvalStats stats;
  OctreeGrid grid;
};

// Coarse-to-fine extraction in the box [-0.55, 0.55]^3: evaluate the base
// grid, keep cells whose smallest corner magnitude is within
// subdivision_factor * cell diagonal, split them and evaluate only corners not
// seen before, then run marching cubes on the finest cells.
Extraction extract_mesh(const BatchSdf& sdf, const MeshingConfig& config);

// Full grid evaluation at `resolution` followed by marching cubes. Produces
// the same vertex positions and ordering as extract_mesh for the cells both
// visit.
TriangleMesh extract_mesh_dense(const BatchSdf& sdf, int resolution, double iso = 0.0);

// Re-evaluates `sdf` only at finest corners whose cached magnitude is below
// the reuse threshold and keeps the cached value elsewhere. Throws
// std::invalid_argument when the cache is empty or was built at another
// resolution.
Extraction refine_mesh(const BatchSdf& sdf, const OctreeGrid& cached, const MeshingConfig& config);

// Network versions: levels are checked against the model and the cache must
// come from `from_level`.
Extraction extract_level(const NetworkParams& params, const LatentCode& latent, int level,
                         const MeshingConfig& config);
Extraction refine_level(const NetworkParams& params, const LatentCode& latent, int from_level,
                        int to_level, const OctreeGrid& cached, const MeshingConfig& config);

}  // namespace lodsdf
