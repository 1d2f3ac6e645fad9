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
#include <stdexcept>
#include <string>
#include <vector>

#include "lodsdf/meshing.hpp"
#include "mc_core.hpp"

namespace lodsdf {

BatchSdf make_batch_sdf(SdfFunction f) {
  return [f = std::move(f)](std::span<const Vec3> points, std::span<double> out) {
    for (std::size_t k = 0; k < points.size(); ++k) out[k] = f(points[k]);
  };
}

BatchSdf make_batch_sdf(const NetworkField& field) {
  return [field](std::span<const Vec3> points, std::span<double> out) { field(points, out); };
}

TriangleMesh marching_cubes(const ScalarGrid& grid, double iso) {
  if (grid.nx < 2 || grid.ny < 2 || grid.nz < 2) {
    throw std::invalid_argument("marching_cubes: grid needs at least 2 points per axis");
  }
  const auto count = static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny) *
                     static_cast<std::size_t>(grid.nz);
  if (grid.values.size() != count) {
    throw std::invalid_argument("marching_cubes: expected " + std::to_string(count) +
                                " values, got " + std::to_string(grid.values.size()));
  }
  detail::Lattice lattice{{grid.nx, grid.ny, grid.nz}, grid.origin, grid.spacing};
  std::vector<std::uint64_t> cells;
  cells.reserve(static_cast<std::size_t>(grid.nx - 1) * static_cast<std::size_t>(grid.ny - 1) *
                static_cast<std::size_t>(grid.nz - 1));
  for (int k = 0; k + 1 < grid.nz; ++k) {
    for (int j = 0; j + 1 < grid.ny; ++j) {
      for (int i = 0; i + 1 < grid.nx; ++i) cells.push_back(lattice.key(i, j, k));
    }
  }
  return detail::polygonize(
      lattice, cells, [&](std::uint64_t key) { return grid.values[key]; }, iso);
}

TriangleMesh extract_mesh_dense(const BatchSdf& sdf, int resolution, double iso) {
  if (resolution < 1) throw std::invalid_argument("extract_mesh_dense: resolution must be >= 1");
  const int n = resolution + 1;
  ScalarGrid grid;
  grid.nx = grid.ny = grid.nz = n;
  grid.origin = Vec3::Constant(-kExtractionHalfExtent);
  grid.spacing = 2.0 * kExtractionHalfExtent / resolution;
  grid.values.resize(static_cast<std::size_t>(n) * n * n);
  detail::Lattice lattice{{n, n, n}, grid.origin, grid.spacing};

  // One z slab at a time keeps the point buffer small.
  std::vector<Vec3> points(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    const std::uint64_t first = lattice.key(0, 0, k);
    for (std::size_t p = 0; p < points.size(); ++p) points[p] = lattice.position(first + p);
    sdf(points, std::span<double>(grid.values.data() + first, points.size()));
  }
  return marching_cubes(grid, iso);
}

}  // namespace lodsdf
