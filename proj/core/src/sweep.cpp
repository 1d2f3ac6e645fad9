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

#include "lodsdf/report.hpp"

#include <exception>
#include <stdexcept>

#include "lodsdf/metrics.hpp"

namespace lodsdf {

void MetricReport::write_csv(std::ostream& out) const {
  out << "level,cd_e5,ed_e4,sr_e3,evals\n";
  out.precision(10);
  for (const auto& row : rows) {
    out << row.level << ',' << row.cd << ',' << row.ed << ',' << row.sr << ',' << row.evals
        << '\n';
  }
}

nlohmann::json MetricReport::summary() const {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r = {{"level", row.level},       {"cd_e5", row.cd},
                        {"ed_e4", row.ed},          {"sr_e3", row.sr},
                        {"evals", row.evals},       {"ed_approximate", row.ed_approximate}};
    if (!row.error.empty()) r["error"] = row.error;
    levels.push_back(r);
  }
  return {{"ed_non_increasing", ed_non_increasing},
          {"sr_non_decreasing", sr_non_decreasing},
          {"levels", levels}};
}

bool ed_trend_holds(std::span<const MetricRow> rows, double band) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].error.empty()) return false;
    if (i > 0 && rows[i].ed > (1.0 + band) * rows[i - 1].ed) return false;
  }
  return true;
}

bool sr_trend_holds(std::span<const MetricRow> rows, double band) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].error.empty()) return false;
    if (i > 0 && rows[i].sr < (1.0 - band) * rows[i - 1].sr) return false;
  }
  return true;
}

MetricReport depth_sweep_report(const NetworkParams& params, std::span<const LatentCode> latents,
                                std::span<const SdfOracle> oracles, const SweepConfig& config) {
  if (latents.size() != oracles.size() || latents.empty()) {
    throw std::invalid_argument("depth sweep: need one oracle per latent");
  }
  config.meshing.validate();
  const std::size_t shapes = latents.size();
  std::vector<std::vector<Vec3>> truth_cd(shapes), truth_ed(shapes);
  for (std::size_t s = 0; s < shapes; ++s) {
    truth_cd[s] = oracles[s].surface(config.chamfer_points, config.seed + 2 * s);
    truth_ed[s] = oracles[s].surface(config.emd_points, config.seed + 2 * s + 1);
  }

  MetricReport report;
  for (int level = 1; level < params.config.layers; ++level) {
    MetricRow row;
    row.level = level;
    std::size_t ok = 0;
    for (std::size_t s = 0; s < shapes; ++s) {
      try {
        const Extraction ex = extract_level(params, latents[s], level, config.meshing);
        row.evals += ex.stats.evaluations;
        if (ex.mesh.triangles.empty()) throw std::runtime_error("empty mesh");
        const std::uint64_t seed = config.seed + 1000003ULL * std::uint64_t(level) + s;
        const auto cd_points = sample_surface_points(ex.mesh, config.chamfer_points, seed);
        const auto ed_points = sample_surface_points(ex.mesh, config.emd_points, seed + 7);
        const EmdResult ed = emd(ed_points, truth_ed[s], config.exact_emd_limit);
        row.cd += chamfer(cd_points, truth_cd[s]);
        row.ed += ed.value;
        row.ed_per_shape.push_back(ed.value);
        row.ed_approximate = row.ed_approximate || ed.approximate;
        row.sr += surface_regularity(ex.mesh);
        ++ok;
      } catch (const std::exception& e) {
        if (!row.error.empty()) row.error += "; ";
        row.error += "shape " + std::to_string(s) + ": " + e.what();
      }
    }
    if (ok > 0) {
      row.cd /= double(ok);
      row.ed /= double(ok);
      row.sr /= double(ok);
    }
    report.rows.push_back(std::move(row));
  }
  report.ed_non_increasing = ed_trend_holds(report.rows, config.trend_band);
  report.sr_non_decreasing = sr_trend_holds(report.rows, config.trend_band);
  return report;
}

}  // namespace lodsdf
