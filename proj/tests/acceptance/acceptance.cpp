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

// Acceptance harness: prints one PASS/FAIL line per criterion. Trained models
// are cached under --cache-dir so reruns skip training. --strict makes any
// FAIL a nonzero exit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "lodsdf/analytic_shape.hpp"
#include "lodsdf/checkpoint.hpp"
#include "lodsdf/config.hpp"
#include "lodsdf/meshing.hpp"
#include "lodsdf/metrics.hpp"
#include "lodsdf/network.hpp"
#include "lodsdf/report.hpp"
#include "lodsdf/spectrum.hpp"
#include "lodsdf/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lodsdf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  std::string id;
  bool pass = false;
  std::string detail;
};

std::vector<Outcome> g_outcomes;

void report(const std::string& id, bool pass, const std::string& detail) {
  g_outcomes.push_back({id, pass, detail});
  std::cout << id << " " << (pass ? "PASS" : "FAIL") << "  " << detail << std::endl;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

LatentCode random_vector(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  LatentCode v(n);
  for (int k = 0; k < n; ++k) v[k] = u(rng);
  return v;
}

Vec3 random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  return {u(rng), u(rng), u(rng)};
}

// Randomizes every tensor so gradients are not dominated by init structure.
void perturb(NetworkParams& p, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 0.3);
  for_each_tensor(p, [&](const std::string&, std::span<double> s) {
    for (double& v : s) v += n(rng);
  });
}

// ---------------------------------------------------------------------------
// Trained models

struct TrainedModel {
  Checkpoint checkpoint;
  std::vector<SdfSampleSet> samples;
  std::vector<SdfOracle> oracles;
  double train_seconds = 0.0;
  bool from_cache = false;
};

RunConfig desk_config(Conditioning c) {
  RunConfig cfg;
  cfg.seed = 0;
  cfg.network.conditioning = c;  // N=7, d_h=64, d_l=32, B=64 by default
  cfg.train.steps = 20000;
  cfg.train.batch_shapes = 4;
  cfg.train.samples_per_shape = 512;
  return cfg;
}

TrainedModel trained_model(const fs::path& cache, Conditioning c) {
  const RunConfig cfg = desk_config(c);
  const std::string key = cfg.to_json().dump();
  const auto tag = std::to_string(std::hash<std::string>{}(key) % 1000000007ULL);
  const fs::path ckpt_path = cache / (std::string(to_string(c)) + "_" + tag + ".lods");
  const fs::path meta_path = fs::path(ckpt_path).replace_extension(".json");

  TrainedModel m;
  m.samples = build_training_samples(cfg);
  for (const auto& s : cfg.resolved_dataset()) m.oracles.push_back(s.oracle());

  if (fs::exists(ckpt_path) && fs::exists(meta_path)) {
    m.checkpoint = load_checkpoint(ckpt_path);
    std::ifstream in(meta_path);
    m.train_seconds = json::parse(in).at("train_seconds").get<double>();
    m.from_cache = true;
    return m;
  }
  std::cout << "  training " << to_string(c) << " model (" << cfg.train.steps << " steps)"
            << std::endl;
  const auto t0 = Clock::now();
  TrainResult r = train(m.samples, cfg.train, cfg.network, [&](const HistoryRow& row) {
    if (row.step % 2000 == 0) {
      std::cout << "    step " << row.step << " loss " << row.loss << std::endl;
    }
  });
  m.train_seconds = seconds_since(t0);
  Checkpoint ck{std::move(r.params), std::move(r.codebook), {}};
  for (const auto& s : cfg.resolved_dataset()) ck.shape_names.push_back(s.name);
  fs::create_directories(cache);
  save_checkpoint(ck, ckpt_path);
  write_file_atomic(meta_path, json{{"train_seconds", m.train_seconds}, {"config", key}}.dump());
  // Evaluate exactly what a reload would see.
  m.checkpoint = load_checkpoint(ckpt_path);
  return m;
}

SweepConfig sweep_config() {
  SweepConfig s;
  s.meshing = MeshingConfig{32, 128};
  s.chamfer_points = 10000;
  s.emd_points = 512;
  s.exact_emd_limit = 512;
  s.seed = 7;
  s.trend_band = 0.05;
  return s;
}

std::vector<LatentCode> codebook_rows(const Checkpoint& ck) {
  std::vector<LatentCode> out;
  for (std::size_t k = 0; k < ck.codebook.size(); ++k) out.push_back(ck.codebook.row(k));
  return out;
}

// ---------------------------------------------------------------------------
// Mesh comparison helpers

bool same_mesh(const TriangleMesh& a, const TriangleMesh& b) {
  return a.vertices == b.vertices && a.triangles == b.triangles;
}

// Largest distance from a point of `a` to its nearest point of `b`, searched
// within one bucket of size `cell`; returns +inf when a point has no partner
// that close.
double directed_hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b, double cell) {
  auto key = [cell](const Vec3& p, int dx, int dy, int dz) {
    const auto q = [cell](double v, int d) {
      return static_cast<std::int64_t>(std::floor(v / cell)) + d + (1 << 20);
    };
    return (q(p.x(), dx) << 42) | (q(p.y(), dy) << 21) | q(p.z(), dz);
  };
  std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
  for (std::size_t k = 0; k < b.size(); ++k) grid[key(b[k], 0, 0, 0)].push_back(k);
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          const auto it = grid.find(key(p, dx, dy, dz));
          if (it == grid.end()) continue;
          for (auto k : it->second) best = std::min(best, (b[k] - p).norm());
        }
      }
    }
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b, double cell) {
  return std::max(directed_hausdorff(a, b, cell), directed_hausdorff(b, a, cell));
}

// ---------------------------------------------------------------------------
// Criteria

void ac1_gradients() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> layers(3, 5), hidden(2, 8), latent(1, 4), design(0, 2);
  const Conditioning designs[] = {Conditioning::kHiddenConcat, Conditioning::kInputConcat,
                                  Conditioning::kOutputConcat};
  double worst = 0.0;
  std::map<std::string, double> per_class;
  int checks = 0;
  for (int net = 0; net < 20; ++net) {
    NetworkConfig cfg;
    cfg.layers = layers(rng);
    cfg.hidden_dim = hidden(rng);
    cfg.latent_dim = latent(rng);
    cfg.bandwidth = 8.0;
    cfg.conditioning = net < 10 ? Conditioning::kHiddenConcat : designs[design(rng)];
    auto p = init_network(cfg, rng());
    perturb(p, rng);
    const LatentCode l = random_vector(rng, cfg.latent_dim, 0.5);
    const SdfSample s{random_point(rng), std::uniform_real_distribution<double>(-0.2, 0.2)(rng)};
    for (int level = 1; level < cfg.layers; ++level) {
      const auto r = grad_check(p, l, s, level, 1e-4, LossWeights{1e-2, 1e-4});
      worst = std::max(worst, r.max_relative_error);
      for (const auto& [k, v] : r.per_class) per_class[k] = std::max(per_class[k], v);
      ++checks;
    }
  }
  const double secs = seconds_since(t0);
  std::string classes;
  for (const auto& [k, v] : per_class) classes += " " + k + "=" + fmt("%.1e", v);
  report("AC-1", worst < 1e-4 && per_class.size() == 7 && secs < 30.0,
         "max rel err " + fmt("%.2e", worst) + " over " + std::to_string(checks) +
             " (net, level) checks;" + classes + "; " + fmt("%.1f s", secs));
}

void ac2_collapse() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> layers(3, 7), hidden(2, 16), latent(1, 8);
  double worst = 0.0;
  int comparisons = 0;
  for (int trial = 0; trial < 100; ++trial) {
    NetworkConfig cfg;
    cfg.layers = layers(rng);
    cfg.hidden_dim = hidden(rng);
    cfg.latent_dim = latent(rng);
    cfg.bandwidth = 32.0;
    auto p = init_network(cfg, rng());
    perturb(p, rng);
    const LatentCode l =
        trial == 0 ? LatentCode::Zero(cfg.latent_dim) : random_vector(rng, cfg.latent_dim, 1.0);
    const Vec3 x = random_point(rng);
    const auto up = collapse_latent(p, l);
    const auto trace = forward_all(p, x, l);
    for (int level = 1; level < cfg.layers; ++level) {
      const double a = trace.level(level);
      const double b = forward_unconditional(up, x, level);
      const double scale = std::max(std::abs(a), std::abs(b));
      worst = std::max(worst, scale == 0.0 ? 0.0 : std::abs(a - b) / scale);
      ++comparisons;
    }
  }
  const double secs = seconds_since(t0);
  report("AC-2", worst < 1e-9 && secs < 10.0,
         "max rel diff " + fmt("%.2e", worst) + " over " + std::to_string(comparisons) +
             " level outputs (100 triples, l=0 included); " + fmt("%.2f s", secs));
}

void ac3_overfit(const TrainedModel& m) {
  const auto& ck = m.checkpoint;
  const int top = ck.params.levels();
  double worst_mse = 0.0;
  std::string per_shape;
  for (std::size_t k = 0; k < m.samples.size(); ++k) {
    const auto b = evaluate_loss(ck.params, ck.codebook.row(k), m.samples[k], {});
    worst_mse = std::max(worst_mse, b.fine_mse.back());
    per_shape += " " + ck.shape_names[k] + "=" + fmt("%.1e", b.fine_mse.back());
  }
  MeshingConfig mc{32, 128};
  const auto sphere = extract_level(ck.params, ck.codebook.row(0), top, mc);
  double cd = std::numeric_limits<double>::infinity();
  if (!sphere.mesh.empty()) {
    const auto pts = sample_surface_points(sphere.mesh, 10000, 1);
    cd = chamfer(pts, m.oracles[0].surface(10000, 2));
  }
  const double minutes = m.train_seconds / 60.0;
  report("AC-3", worst_mse < 1e-4 && cd < 50.0 && minutes < 20.0,
         "worst deepest fine MSE " + fmt("%.2e", worst_mse) + " (" + per_shape.substr(1) +
             "); sphere CD " + fmt("%.2f", cd) + "; training " + fmt("%.1f min", minutes) +
             (m.from_cache ? " (cached)" : ""));
}

MetricReport g_design3_report;

void ac4_trends(const TrainedModel& m) {
  const auto t0 = Clock::now();
  const auto latents = codebook_rows(m.checkpoint);
  g_design3_report = depth_sweep_report(m.checkpoint.params, latents, m.oracles, sweep_config());
  std::ostringstream rows;
  for (const auto& r : g_design3_report.rows) {
    rows << " L" << r.level << ":ED=" << fmt("%.1f", r.ed) << ",SR=" << fmt("%.2f", r.sr);
    if (!r.error.empty()) rows << ",error";
  }
  report("AC-4", g_design3_report.ed_non_increasing && g_design3_report.sr_non_decreasing,
         std::string("ED non-increasing=") + (g_design3_report.ed_non_increasing ? "yes" : "no") +
             ", SR non-decreasing=" + (g_design3_report.sr_non_decreasing ? "yes" : "no") + ";" +
             rows.str() + "; " + fmt("%.0f s", seconds_since(t0)));
}

void ac5_band_limit(const TrainedModel& m) {
  const auto& p = m.checkpoint.params;
  double worst = 0.0;
  int lines = 0;
  for (std::size_t s = 0; s < m.checkpoint.codebook.size(); ++s) {
    for (int level = 1; level <= p.levels(); ++level) {
      BandLimitConfig bl;
      bl.lines = 20;
      bl.samples = 1024;
      bl.margin = 1.1;
      bl.seed = 1000 + s * 10 + static_cast<std::uint64_t>(level);
      const auto f = band_limit_fractions(
          make_batch_sdf(NetworkField(p, m.checkpoint.codebook.row(s), level)),
          p.cumulative_bound(level), bl);
      for (double v : f) worst = std::max(worst, v);
      lines += static_cast<int>(f.size());
    }
  }
  report("AC-5", worst < 0.01,
         "max energy fraction above 1.1x cumulative bound " + fmt("%.2e", worst) + " over " +
             std::to_string(lines) + " lines (all shapes, all levels)");
}

void ac6_meshing(const TrainedModel& m) {
  const auto t0 = Clock::now();
  const MeshingConfig mc{32, 128};
  const double dense_count = 129.0 * 129.0 * 129.0;
  bool analytic_ok = true;
  for (const auto& [name, shape] : default_shape_set()) {
    const auto sdf = make_batch_sdf([s = shape](const Vec3& x) { return s(x); });
    if (!same_mesh(extract_mesh(sdf, mc).mesh, extract_mesh_dense(sdf, 128))) {
      analytic_ok = false;
      std::cout << "  octree/dense mismatch on " << name << std::endl;
    }
  }

  const auto& p = m.checkpoint.params;
  const int top = p.levels();
  bool model_ok = true;
  double worst_ratio = 0.0;
  double worst_refine = 0.0;
  bool fewer = true;
  std::uint64_t refine_evals = 0, fresh_evals = 0;
  for (std::size_t s = 0; s < m.checkpoint.codebook.size(); ++s) {
    const LatentCode l = m.checkpoint.codebook.row(s);
    const auto sparse = extract_level(p, l, top, mc);
    const auto dense = extract_mesh_dense(make_batch_sdf(NetworkField(p, l, top)), 128);
    if (!same_mesh(sparse.mesh, dense)) {
      model_ok = false;
      std::cout << "  octree/dense mismatch on trained shape " << s << std::endl;
    }
    worst_ratio = std::max(worst_ratio, double(sparse.stats.evaluations) / dense_count);

    const auto cached = extract_level(p, l, top - 1, mc);
    const auto refined = refine_level(p, l, top - 1, top, cached.grid, mc);
    const double h = hausdorff(refined.mesh.vertices, sparse.mesh.vertices, 1e-3);
    worst_refine = std::max(worst_refine, h);
    fewer = fewer && refined.stats.evaluations < sparse.stats.evaluations;
    refine_evals += refined.stats.evaluations;
    fresh_evals += sparse.stats.evaluations;
  }
  report("AC-6",
         analytic_ok && model_ok && worst_ratio < 0.35 && worst_refine <= 1e-6 && fewer,
         std::string("octree==dense: analytic ") + (analytic_ok ? "8/8" : "no") + ", trained " +
             (model_ok ? "8/8" : "no") + "; worst evals/dense " + fmt("%.3f", worst_ratio) +
             "; refine L" + std::to_string(top - 1) + "->L" + std::to_string(top) +
             " vertex Hausdorff " + fmt("%.1e", worst_refine) + ", evals " +
             std::to_string(refine_evals) + " vs fresh " + std::to_string(fresh_evals) + "; " +
             fmt("%.0f s", seconds_since(t0)));
}

// Random capsules with arbitrary axes: the shape family the completion prior is
// trained on. Held-out members come from the same distribution.
AnalyticShape draw_capsule(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> radius(0.1, 0.18), half_len(0.08, 0.25);
  std::normal_distribution<double> n;
  Vec3 axis(n(rng), n(rng), n(rng));
  axis.normalize();
  const double h = half_len(rng);
  return AnalyticShape::capsule(-h * axis, h * axis, radius(rng));
}

constexpr int kFamilySize = 16;

NetworkParams capsule_prior(const fs::path& cache) {
  RunConfig cfg = desk_config(Conditioning::kHiddenConcat);
  const std::string key = "capsule_family_16_seed77:" + cfg.to_json().dump();
  const auto tag = std::to_string(std::hash<std::string>{}(key) % 1000000007ULL);
  const fs::path path = cache / ("capsule_prior_" + tag + ".lods");
  if (!fs::exists(path)) {
    std::mt19937_64 rng(77);
    std::vector<SdfSampleSet> sets;
    Checkpoint ck;
    for (int k = 0; k < kFamilySize; ++k) {
      sets.push_back(sample_training_set(make_oracle(draw_capsule(rng)), cfg.sampling,
                                         static_cast<std::uint64_t>(k)));
      ck.shape_names.push_back("capsule_" + std::to_string(k));
    }
    std::cout << "  training capsule prior (" << cfg.train.steps << " steps)" << std::endl;
    TrainResult r = train(sets, cfg.train, cfg.network);
    ck.params = std::move(r.params);
    ck.codebook = std::move(r.codebook);
    fs::create_directories(cache);
    save_checkpoint(ck, path);
  }
  return load_checkpoint(path).params;
}

struct CompletionResult {
  bool closed = false;
  std::size_t neg = 0, pos = 0;
  double cd_half = 0.0, cd_full = 0.0;
  bool pass() const { return closed && neg > 0 && pos > 0 && cd_half <= 3.0 * cd_full; }
};

CompletionResult complete(const NetworkParams& p, const AnalyticShape& shape, std::uint64_t seed) {
  const auto oracle = make_oracle(shape);
  const auto samples = sample_training_set(oracle, SamplingConfig{}, seed);
  FitConfig fc;
  fc.seed = 5;
  fc.samples_per_step = 2048;
  const SpatialMask left = [](const Vec3& x) { return x.x() < 0.0; };
  const LatentCode l_half = fit_latent_masked(p, samples, left, fc);
  const LatentCode l_full = fit_latent(p, samples, fc);

  const MeshingConfig mc{32, 128};
  const auto mesh_half = extract_level(p, l_half, p.levels(), mc).mesh;
  const auto mesh_full = extract_level(p, l_full, p.levels(), mc).mesh;

  CompletionResult r;
  for (const auto& v : mesh_half.vertices) (v.x() < 0.0 ? r.neg : r.pos)++;
  r.closed = !mesh_half.empty() && is_watertight(mesh_half);

  auto left_points = [&](const std::vector<Vec3>& pts) {
    std::vector<Vec3> out;
    for (const auto& q : pts) {
      if (q.x() < 0.0) out.push_back(q);
    }
    return out;
  };
  const auto gt = left_points(oracle.surface(20000, 9));
  auto half_cd = [&](const TriangleMesh& mesh) {
    if (mesh.empty()) return std::numeric_limits<double>::infinity();
    const auto pts = left_points(sample_surface_points(mesh, 20000, 10));
    if (pts.empty()) return std::numeric_limits<double>::infinity();
    return chamfer(pts, gt);
  };
  r.cd_half = half_cd(mesh_half);
  r.cd_full = half_cd(mesh_full);
  return r;
}

std::string describe(const CompletionResult& r) {
  return std::string("closed=") + (r.closed ? "yes" : "no") + " x<0/x>0 " +
         std::to_string(r.neg) + "/" + std::to_string(r.pos) + " CD " + fmt("%.2f", r.cd_half) +
         " vs " + fmt("%.2f", r.cd_full);
}

// Gate: a prior trained on the capsule family completes four held-out members.
// The desk model's result on an out-of-family capsule is printed for reference.
void ac7_completion(const TrainedModel& m, const fs::path& cache) {
  const auto t0 = Clock::now();
  const auto desk = complete(m.checkpoint.params,
                             AnalyticShape::capsule(Vec3(0.0, -0.22, 0.0), Vec3(0.0, 0.22, 0.0), 0.16),
                             4242);
  std::cout << "  AC-7 reference (desk model, y-axis capsule): " << describe(desk)
            << (desk.pass() ? " [within gate]" : " [outside gate]") << std::endl;

  const NetworkParams prior = capsule_prior(cache);
  std::mt19937_64 held(99);
  bool all = true;
  std::string detail;
  for (int t = 0; t < 4; ++t) {
    const auto r = complete(prior, draw_capsule(held), 4242 + static_cast<std::uint64_t>(t));
    all = all && r.pass();
    detail += "held-out " + std::to_string(t) + ": " + describe(r) + "; ";
  }
  report("AC-7", all, detail + "limit 3x; " + fmt("%.0f s", seconds_since(t0)));
}

void ac8_metrics() {
  std::mt19937_64 rng(808);
  auto cloud = [&](std::size_t n) {
    std::vector<Vec3> v(n);
    for (auto& q : v) q = random_point(rng);
    return v;
  };
  const auto a = cloud(500), b = cloud(500);
  const double cd = chamfer(a, b), cd_ref = chamfer_brute_force(a, b);
  const bool cd_ok = cd == cd_ref;

  double worst_ed = 0.0;
  for (int t = 0; t < 5; ++t) {
    const auto x = cloud(64), y = cloud(64);
    const double exact = emd_exact(x, y);
    worst_ed = std::max(worst_ed, std::abs(emd_sinkhorn(x, y) - exact) / exact);
  }
  const bool ed_ok = worst_ed < 0.02;

  TriangleMesh grid;
  const int n = 8;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) grid.vertices.emplace_back(0.05 * i, 0.05 * j, 0.0);
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const auto v = static_cast<std::uint32_t>(i + (n + 1) * j);
      const auto w = static_cast<std::uint32_t>(n + 1);
      grid.triangles.push_back({v, v + 1, v + 1 + w});
      grid.triangles.push_back({v, v + 1 + w, v + w});
    }
  }
  const double sr_plane = surface_regularity(grid);

  TriangleMesh tet;
  const double s = 1.0 / std::sqrt(8.0);
  tet.vertices = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  tet.triangles = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  // Each vertex moves to the centroid of the opposite face: the height sqrt(2/3).
  const double sr_tet = surface_regularity(tet);
  const double expected = 1e3 * std::sqrt(2.0 / 3.0);
  const bool sr_ok = std::abs(sr_plane) <= 1e-9 && std::abs(sr_tet - expected) <= 1e-9;

  report("AC-8", cd_ok && ed_ok && sr_ok,
         "CD rtree " + fmt("%.6f", cd) + " vs brute " + fmt("%.6f", cd_ref) +
             (cd_ok ? " (equal)" : " (differ)") + "; Sinkhorn worst rel gap " +
             fmt("%.2e", worst_ed) + "; SR plane " + fmt("%.1e", sr_plane) + ", tetra " +
             fmt("%.10f", sr_tet) + " vs " + fmt("%.10f", expected));
}

void ac9_ablation(const fs::path& cache) {
  // Output-concat: the latent only shifts the output.
  std::mt19937_64 rng(909);
  NetworkConfig cfg;
  cfg.conditioning = Conditioning::kOutputConcat;
  auto p2 = init_network(cfg, 3);
  const LatentCode la = random_vector(rng, cfg.latent_dim, 0.5);
  const LatentCode lb = random_vector(rng, cfg.latent_dim, 0.5);
  std::vector<Vec3> grid;
  for (int k = 0; k < 32; ++k) {
    for (int j = 0; j < 32; ++j) {
      for (int i = 0; i < 32; ++i) {
        grid.emplace_back(-0.5 + i / 31.0, -0.5 + j / 31.0, -0.5 + k / 31.0);
      }
    }
  }
  double worst_var = 0.0;
  for (int level = 1; level <= p2.levels(); ++level) {
    const auto fa = forward_batch(p2, grid, la, level);
    const auto fb = forward_batch(p2, grid, lb, level);
    double mean = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) mean += fa[k] - fb[k];
    mean /= static_cast<double>(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) sq += std::pow(fa[k] - fb[k] - mean, 2);
    worst_var = std::max(worst_var, sq / static_cast<double>(grid.size()));
  }

  const auto deepest_ed = [](const MetricReport& r) {
    return r.rows.empty() || !r.rows.back().error.empty() ? std::numeric_limits<double>::infinity()
                                                          : r.rows.back().ed;
  };
  const double ed3 = deepest_ed(g_design3_report);
  double ed_design[2] = {0.0, 0.0};
  const Conditioning others[2] = {Conditioning::kInputConcat, Conditioning::kOutputConcat};
  for (int d = 0; d < 2; ++d) {
    const auto m = trained_model(cache, others[d]);
    const auto latents = codebook_rows(m.checkpoint);
    ed_design[d] = deepest_ed(depth_sweep_report(m.checkpoint.params, latents, m.oracles,
                                                 sweep_config()));
  }
  report("AC-9", worst_var < 1e-12 && ed_design[0] > ed3 && ed_design[1] > ed3,
         "output-concat latent offset variance " + fmt("%.1e", worst_var) +
             "; deepest mean ED input-concat " + fmt("%.2f", ed_design[0]) + ", output-concat " +
             fmt("%.2f", ed_design[1]) + ", hidden-concat " + fmt("%.2f", ed3));
}

}  // namespace

int main(int argc, char** argv) {
  fs::path cache = fs::temp_directory_path() / "lodsdf_acceptance_cache";
  bool strict = false;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--cache-dir" && k + 1 < argc) {
      cache = argv[++k];
    } else if (a == "--strict") {
      strict = true;
    } else {
      std::cerr << "usage: lodsdf_acceptance [--cache-dir DIR] [--strict]\n";
      return 2;
    }
  }
  fs::create_directories(cache);

  const auto guarded = [](const std::string& id, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
  };

  guarded("AC-1", ac1_gradients);
  guarded("AC-2", ac2_collapse);
  TrainedModel model;
  try {
    model = trained_model(cache, Conditioning::kHiddenConcat);
  } catch (const std::exception& e) {
    for (const char* id : {"AC-3", "AC-4", "AC-5", "AC-6", "AC-7"}) {
      report(id, false, std::string("training failed: ") + e.what());
    }
  }
  if (!model.samples.empty() && model.checkpoint.codebook.size() > 0) {
    guarded("AC-3", [&] { ac3_overfit(model); });
    guarded("AC-4", [&] { ac4_trends(model); });
    guarded("AC-5", [&] { ac5_band_limit(model); });
    guarded("AC-6", [&] { ac6_meshing(model); });
    guarded("AC-7", [&] { ac7_completion(model, cache); });
  }
  guarded("AC-8", ac8_metrics);
  guarded("AC-9", [&] { ac9_ablation(cache); });

  int failed = 0;
  for (const auto& o : g_outcomes) failed += o.pass ? 0 : 1;
  std::cout << (g_outcomes.size() - static_cast<std::size_t>(failed)) << "/" << g_outcomes.size()
            << " acceptance criteria passed" << std::endl;
  // Without --strict the exit code only says every criterion was evaluated.
  if (strict) return failed == 0 ? 0 : 1;
  return g_outcomes.size() == 9 ? 0 : 1;
}
