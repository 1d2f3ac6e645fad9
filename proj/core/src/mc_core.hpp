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

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>

#include "lodsdf/geometry.hpp"
#include "mc_tables.hpp"

namespace lodsdf::detail {

// Regular lattice with dims[a] points along axis a; key = i + nx * (j + ny * k).
struct Lattice {
  std::array<std::int64_t, 3> dims{};
  Vec3 origin = Vec3::Zero();
  double spacing = 1.0;

  std::uint64_t key(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return static_cast<std::uint64_t>(i + dims[0] * (j + dims[1] * k));
  }
  std::array<std::int64_t, 3> coords(std::uint64_t key) const {
    const auto k = static_cast<std::int64_t>(key);
    return {k % dims[0], (k / dims[0]) % dims[1], k / (dims[0] * dims[1])};
  }
  Vec3 position(std::uint64_t key) const {
    const auto c = coords(key);
    return origin + spacing * Vec3(double(c[0]), double(c[1]), double(c[2]));
  }
  std::uint64_t corner(std::uint64_t cell, int c) const {
    const auto& o = kCornerOffsets[static_cast<std::size_t>(c)];
    return cell + key(o[0], o[1], o[2]);
  }
};

inline double perturb_iso(double v, double iso) { return v == iso ? iso + 1e-9 : v; }

// Marching cubes over `cells` (min-corner keys, processed in the given order).
// `value(key)` returns the corner value.
template <class Lookup>
TriangleMesh polygonize(const Lattice& lattice, std::span<const std::uint64_t> cells,
                        Lookup&& value, double iso) {
  TriangleMesh mesh;
  std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
  for (const std::uint64_t cell : cells) {
    std::array<std::uint64_t, 8> keys{};
    std::array<double, 8> vals{};
    int cube = 0;
    for (int c = 0; c < 8; ++c) {
      keys[static_cast<std::size_t>(c)] = lattice.corner(cell, c);
      const double v = perturb_iso(value(keys[static_cast<std::size_t>(c)]), iso);
      vals[static_cast<std::size_t>(c)] = v;
      if (v < iso) cube |= 1 << c;
    }
    if (cube == 0 || cube == 255) continue;

    const auto& row = kTriangleTable[cube];
    for (int t = 0; row[t] != -1; t += 3) {
      std::array<std::uint32_t, 3> tri{};
      for (int s = 0; s < 3; ++s) {
        const int e = row[t + s];
        const auto [c0, c1] = kEdgeCorners[static_cast<std::size_t>(e)];
        std::size_t a = static_cast<std::size_t>(c0);
        std::size_t b = static_cast<std::size_t>(c1);
        if (keys[b] < keys[a]) std::swap(a, b);
        const std::uint64_t delta = keys[b] - keys[a];
        const int axis = delta == 1 ? 0 : (delta == static_cast<std::uint64_t>(lattice.dims[0]) ? 1 : 2);
        const std::uint64_t edge_key = keys[a] * 3 + static_cast<std::uint64_t>(axis);
        auto [it, inserted] =
            edge_vertex.try_emplace(edge_key, static_cast<std::uint32_t>(mesh.vertices.size()));
        if (inserted) {
          const double t_edge = (iso - vals[a]) / (vals[b] - vals[a]);
          const Vec3 pa = lattice.position(keys[a]);
          const Vec3 pb = lattice.position(keys[b]);
          mesh.vertices.push_back(pa + t_edge * (pb - pa));
        }
        tri[static_cast<std::size_t>(s)] = it->second;
      }
      // The table winds triangles around the inside corners; flip for outward normals.
      std::swap(tri[1], tri[2]);
      mesh.triangles.push_back(tri);
    }
  }
  return mesh;
}

}  // namespace lodsdf::detail
