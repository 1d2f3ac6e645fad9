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

#include <memory>
#include <vector>

#include <Eigen/Geometry>

#include "lodsdf/geometry.hpp"

namespace lodsdf {

// Squared distance from `p` to the closed triangle (a, b, c).
double point_triangle_squared_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                                       const Vec3& c);

// Möller-Trumbore test for a hit at ray parameter t > 0.
bool ray_hits_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                       const Vec3& c);

// Jittered ray directions used for inside/outside voting.
const std::array<Vec3, 3>& parity_ray_directions();

// Signed distance to a watertight triangle mesh. The magnitude is the exact
// point-to-triangle minimum; the sign comes from a majority vote of ray
// crossing parities along three jittered directions (odd -> inside).
class MeshSdf {
 public:
  // Throws GeometryError if the mesh is empty, has bad indices or is not watertight.
  explicit MeshSdf(TriangleMesh mesh);
  ~MeshSdf();
  MeshSdf(MeshSdf&&) noexcept;
  MeshSdf& operator=(MeshSdf&&) noexcept;

  double operator()(const Vec3& x) const;
  double unsigned_distance(const Vec3& x) const;
  // Number of triangles crossed by the ray from `x` along `dir`.
  std::size_t crossings(const Vec3& x, const Vec3& dir) const;

  const TriangleMesh& mesh() const { return mesh_; }

 private:
  struct Bvh;
  TriangleMesh mesh_;
  std::unique_ptr<Bvh> bvh_;
};

}  // namespace lodsdf
