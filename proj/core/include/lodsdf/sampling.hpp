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
#include <filesystem>
#include <functional>
#include <vector>

#include "lodsdf/geometry.hpp"

namespace lodsdf {

class AnalyticShape;
class MeshSdf;

using SdfFunction = std::function<double(const Vec3&)>;
using SurfaceSampler = std::function<std::vector<Vec3>(std::size_t n, std::uint64_t seed)>;

// Ground-truth distance field plus a way to draw points on its zero set.
struct SdfOracle {
  SdfFunction distance;
  SurfaceSampler surface;
};

// Surface points come from projecting uniform box samples onto the zero set.
SdfOracle make_oracle(const AnalyticShape& shape);
// Surface points are drawn area-uniformly from the mesh triangles.
SdfOracle make_oracle(std::shared_ptr<const MeshSdf> mesh);

struct SdfSample {
  Vec3 position = Vec3::Zero();
  double distance = 0.0;
};

// Ground truth samples split by |distance| rank: `fine` holds the closest
// fraction, `coarse` the rest.
struct SdfSampleSet {
  std::vector<SdfSample> fine;
  std::vector<SdfSample> coarse;
  int shape_id = 0;

  std::size_t size() const { return fine.size() + coarse.size(); }
};

struct SamplingConfig {
  std::size_t total = 10000;
  double fine_fraction = 0.05;
  // Gaussian perturbation scales relative to the domain extent.
  double near_sigma = 0.0025;
  double far_sigma = 0.025;
  double uniform_fraction = 0.05;
  double uniform_half_extent = 0.55;
};

// Mixture of perturbed surface points (two noise scales, equal shares) and
// uniform points in the padded box, labeled by the oracle and split at the
// fine_fraction quantile of |distance|. Throws std::invalid_argument when
// total < 20 or fine_fraction is outside (0, 1).
SdfSampleSet sample_training_set(const SdfOracle& oracle, const SamplingConfig& config,
                                 std::uint64_t seed);

// Little-endian binary: "SDFS", u32 version, u64 n_fine, u64 n_coarse, then
// (f32 x, y, z, s) records with the fine block first.
void save_samples(const SdfSampleSet& samples, const std::filesystem::path& path);
SdfSampleSet load_samples(const std::filesystem::path& path);
std::string encode_samples(const SdfSampleSet& samples);
SdfSampleSet decode_samples(const std::string& bytes);

}  // namespace lodsdf
