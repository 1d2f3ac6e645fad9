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

#include <cstddef>
#include <span>

#include "lodsdf/geometry.hpp"

namespace lodsdf {

// Mean squared nearest-neighbor distance from a to b plus from b to a, times
// 1e5. Exact nearest neighbors through an R-tree. Throws std::invalid_argument
// when either set is empty.
double chamfer(std::span<const Vec3> a, std::span<const Vec3> b);

// Same quantity by an O(|a| |b|) double loop.
double chamfer_brute_force(std::span<const Vec3> a, std::span<const Vec3> b);

struct EmdResult {
  double value = 0.0;  // mean matched Euclidean distance times 1e4
  bool approximate = false;
};

struct SinkhornConfig {
  double epsilon_start = 0.1;
  double epsilon_end = 1e-3;
  int iterations = 200;
};

// Optimal one-to-one assignment cost. Exact (Hungarian) up to `exact_limit`
// points, entropic transport above. Throws std::invalid_argument when the
// sizes differ or the sets are empty.
EmdResult emd(std::span<const Vec3> a, std::span<const Vec3> b, std::size_t exact_limit = 512);
double emd_exact(std::span<const Vec3> a, std::span<const Vec3> b);
double emd_sinkhorn(std::span<const Vec3> a, std::span<const Vec3> b,
                    const SinkhornConfig& config = {});

// Mean distance between each vertex and the average of its 1-ring neighbors,
// times 1e3. Boundary and isolated vertices are skipped. Throws
// std::invalid_argument when no vertex qualifies.
double surface_regularity(const TriangleMesh& mesh);

}  // namespace lodsdf
