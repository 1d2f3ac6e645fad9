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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lodsdf/analytic_shape.hpp"
#include "lodsdf/meshing.hpp"
#include "lodsdf/network.hpp"
#include "lodsdf/report.hpp"
#include "lodsdf/sampling.hpp"
#include "lodsdf/training.hpp"

namespace lodsdf {

// One dataset entry: an analytic shape or a watertight OBJ file.
struct ShapeSource {
  std::string name;
  std::optional<AnalyticShape> analytic;
  std::filesystem::path obj;

  SdfOracle oracle() const;
};

// Declarative description of a run. Every section is optional and falls back
// to the defaults; unknown keys anywhere raise ConfigError.
struct RunConfig {
  std::uint64_t seed = 0;
  NetworkConfig network;
  TrainConfig train;
  SamplingConfig sampling;
  MeshingConfig meshing;
  FitConfig fit;
  SweepConfig metrics;
  std::vector<ShapeSource> dataset;  // empty selects default_shape_set()

  // Relative OBJ paths resolve against `base_dir`.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  std::vector<ShapeSource> resolved_dataset() const;
  void validate() const;
};

// Ground-truth samples for every dataset shape; shape k uses seed + k.
std::vector<SdfSampleSet> build_training_samples(const RunConfig& config);

}  // namespace lodsdf
