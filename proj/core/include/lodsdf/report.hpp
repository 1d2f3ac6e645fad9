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
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lodsdf/meshing.hpp"
#include "lodsdf/network.hpp"
#include "lodsdf/sampling.hpp"

namespace lodsdf {

struct SweepConfig {
  MeshingConfig meshing{32, 128};
  std::size_t chamfer_points = 10000;
  std::size_t emd_points = 5000;
  std::size_t exact_emd_limit = 512;
  std::uint64_t seed = 0;
  double trend_band = 0.05;
};

// Scores averaged over the shapes of one level.
struct MetricRow {
  int level = 0;
  double cd = 0.0;   // x1e5
  double ed = 0.0;   // x1e4
  double sr = 0.0;   // x1e3
  std::uint64_t evals = 0;  // summed over shapes
  bool ed_approximate = false;
  std::vector<double> ed_per_shape;
  std::string error;  // non-empty when a shape failed at this level
};

struct MetricReport {
  std::vector<MetricRow> rows;
  bool ed_non_increasing = false;
  bool sr_non_decreasing = false;

  void write_csv(std::ostream& out) const;
  nlohmann::json summary() const;
};

// ED may rise by at most `band` between consecutive rows and SR may fall by
// at most `band`; rows with errors fail the check.
bool ed_trend_holds(std::span<const MetricRow> rows, double band);
bool sr_trend_holds(std::span<const MetricRow> rows, double band);

// Extracts every level of every shape, samples both surfaces and records
// CD, ED, SR and evaluation counts. A failing shape marks its row with an
// error and the sweep continues.
MetricReport depth_sweep_report(const NetworkParams& params, std::span<const LatentCode> latents,
                                std::span<const SdfOracle> oracles, const SweepConfig& config);

}  // namespace lodsdf
