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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lodsdf {

using Vec3 = Eigen::Vector3d;

// Raised for invalid geometry, malformed files and failed ingestion.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Indexed triangle mesh.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }

  // Throws GeometryError if any triangle references a missing vertex.
  void validate() const;
};

// True iff every undirected edge is shared by exactly two triangles.
bool is_watertight(const TriangleMesh& mesh);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

// Area-uniform surface samples: a triangle is picked with probability
// proportional to its area, then a uniform barycentric point inside it.
std::vector<Vec3> sample_surface_points(const TriangleMesh& mesh, std::size_t n,
                                        std::uint64_t seed);

// ASCII OBJ with `v` and `f` records. Polygons are fan-triangulated on load;
// `f` entries may carry texture/normal indices (`1/2/3`), which are ignored.
TriangleMesh load_obj(const std::filesystem::path& path);
TriangleMesh parse_obj(const std::string& text);
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
std::string format_obj(const TriangleMesh& mesh);

// Writes `bytes` to `path` through a temporary file and an atomic rename, so a
// failed write never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace lodsdf
