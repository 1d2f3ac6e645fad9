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

#include "lodsdf_tools/cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "lodsdf/analytic_shape.hpp"
#include "lodsdf/checkpoint.hpp"
#include "lodsdf/config.hpp"
#include "lodsdf/mesh_sdf.hpp"
#include "lodsdf/meshing.hpp"
#include "lodsdf/report.hpp"
#include "lodsdf/spectrum.hpp"
#include "lodsdf_tools/service.hpp"

namespace lodsdf {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

LatentCode read_latent_file(const fs::path& path, int d_l) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open latent file " + path.string());
  json j = json::parse(in);
  if (j.is_object() && j.contains("latent")) j = j.at("latent");
  if (!j.is_array() || static_cast<int>(j.size()) != d_l) {
    throw std::runtime_error("latent file must hold " + std::to_string(d_l) + " numbers");
  }
  LatentCode l(d_l);
  for (int k = 0; k < d_l; ++k) l[k] = j.at(static_cast<std::size_t>(k)).get<double>();
  return l;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

SpatialMask parse_mask(std::string_view spec) {
  constexpr std::string_view kPrefix = "halfspace:";
  auto fail = [&] {
    return std::invalid_argument("bad mask '" + std::string(spec) +
                                 "', expected halfspace:<x|y|z><op><value>");
  };
  if (spec.substr(0, kPrefix.size()) != kPrefix) throw fail();
  std::string_view rest = spec.substr(kPrefix.size());
  if (rest.size() < 3) throw fail();
  const int axis = rest[0] == 'x' ? 0 : rest[0] == 'y' ? 1 : rest[0] == 'z' ? 2 : -1;
  if (axis < 0) throw fail();
  rest.remove_prefix(1);
  std::string op;
  for (std::string_view candidate : {"<=", ">=", "<", ">"}) {
    if (rest.substr(0, candidate.size()) == candidate) {
      op = candidate;
      break;
    }
  }
  if (op.empty()) throw fail();
  rest.remove_prefix(op.size());
  double value = 0.0;
  const auto [end, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
  if (ec != std::errc() || end != rest.data() + rest.size()) throw fail();
  return [axis, op, value](const Vec3& p) {
    const double c = p[axis];
    if (op == "<") return c < value;
    if (op == "<=") return c <= value;
    if (op == ">") return c > value;
    return c >= value;
  };
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Level-of-detail neural SDF toolkit"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model from a run config");
  std::string train_config, train_out = "model.lods", train_history;
  long train_steps = 0;
  bool quiet = false;
  train_cmd->add_option("config", train_config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("-o,--output", train_out, "Checkpoint path");
  train_cmd->add_option("--history", train_history, "Loss history CSV");
  train_cmd->add_option("--steps", train_steps, "Override train.steps")->check(CLI::PositiveNumber);
  train_cmd->add_flag("-q,--quiet", quiet, "No progress output");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Write ground-truth SDF samples of one shape");
  std::string sample_shape, sample_obj, sample_analytic, sample_out;
  std::size_t sample_total = 10000;
  double sample_fine = 0.05;
  std::uint64_t sample_seed = 0;
  auto* shape_opt = sample_cmd->add_option("--shape", sample_shape, "Name from the default shape set");
  auto* obj_opt = sample_cmd->add_option("--obj", sample_obj, "Watertight OBJ mesh")->check(CLI::ExistingFile);
  auto* analytic_opt = sample_cmd->add_option("--analytic", sample_analytic, "Analytic shape JSON");
  shape_opt->excludes(obj_opt)->excludes(analytic_opt);
  obj_opt->excludes(analytic_opt);
  sample_cmd->add_option("-o,--output", sample_out, "Sample file")->required();
  sample_cmd->add_option("--total", sample_total, "Number of samples")->check(CLI::Range(20, 100000000));
  sample_cmd->add_option("--fine-fraction", sample_fine, "Share of near-surface samples");
  sample_cmd->add_option("--seed", sample_seed, "Random seed");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit a latent code to samples with a frozen network");
  std::string fit_ckpt, fit_samples, fit_mask, fit_out = "latent.json";
  long fit_steps = -1;
  std::uint64_t fit_seed = 0;
  fit_cmd->add_option("checkpoint", fit_ckpt)->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("samples", fit_samples)->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--mask", fit_mask, "Keep only samples inside, e.g. halfspace:x<0");
  fit_cmd->add_option("--steps", fit_steps, "Optimizer steps")->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--seed", fit_seed, "Random seed");
  fit_cmd->add_option("-o,--output", fit_out, "Latent JSON");

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "Extract a mesh at one level of detail");
  std::string mesh_ckpt, mesh_latent_file, mesh_out = "mesh.obj", mesh_stats;
  int mesh_shape = -1, mesh_level = 0, mesh_refine = 0, mesh_res = 256, mesh_base = 32;
  double mesh_tau = 0.0, mesh_kappa = 3.0;
  mesh_cmd->add_option("checkpoint", mesh_ckpt)->required()->check(CLI::ExistingFile);
  auto* shape_id_opt = mesh_cmd->add_option("--shape-id", mesh_shape, "Codebook row")->check(CLI::NonNegativeNumber);
  auto* latent_opt = mesh_cmd->add_option("--latent-file", mesh_latent_file, "Latent JSON")->check(CLI::ExistingFile);
  shape_id_opt->excludes(latent_opt);
  mesh_cmd->add_option("--level", mesh_level, "Level of detail (from 1)")->required()->check(CLI::Range(1, 1 << 20));
  mesh_cmd->add_option("--refine-from", mesh_refine, "Reuse values of this lower level")->check(CLI::Range(1, 1 << 20));
  mesh_cmd->add_option("--tau", mesh_tau, "Reuse threshold")->check(CLI::PositiveNumber);
  mesh_cmd->add_option("--res", mesh_res, "Target grid resolution")->check(CLI::Range(1, 4096));
  mesh_cmd->add_option("--base", mesh_base, "Base grid resolution")->check(CLI::Range(1, 4096));
  mesh_cmd->add_option("--kappa", mesh_kappa, "Subdivision factor")->check(CLI::Range(1.0, 1e6));
  mesh_cmd->add_option("-o,--output", mesh_out, "OBJ path");
  mesh_cmd->add_option("--stats", mesh_stats, "EvalStats JSON path (default: <output>.stats.json)");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "Depth sweep of CD, ED and SR");
  std::string metrics_ckpt, metrics_config, metrics_out = "report.csv", metrics_summary;
  metrics_cmd->add_option("checkpoint", metrics_ckpt)->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("config", metrics_config)->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("-o,--output", metrics_out, "CSV path");
  metrics_cmd->add_option("--summary", metrics_summary, "Trend summary JSON path");

  // spectrum
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Band-limit check along axis lines");
  std::string spectrum_ckpt;
  int spectrum_level = 0, spectrum_shape = 0;
  BandLimitConfig band;
  spectrum_cmd->add_option("checkpoint", spectrum_ckpt)->required()->check(CLI::ExistingFile);
  spectrum_cmd->add_option("--level", spectrum_level)->required()->check(CLI::Range(1, 1 << 20));
  spectrum_cmd->add_option("--shape-id", spectrum_shape)->check(CLI::NonNegativeNumber);
  spectrum_cmd->add_option("--lines", band.lines)->check(CLI::PositiveNumber);
  spectrum_cmd->add_option("--samples", band.samples)->check(CLI::Range(8, 1 << 24));
  spectrum_cmd->add_option("--seed", band.seed);

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "HTTP service for mesh queries");
  std::string serve_ckpt, serve_host = "127.0.0.1";
  int serve_port = 8080;
  ServiceOptions serve_opts;
  serve_cmd->add_option("checkpoint", serve_ckpt)->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", serve_port)->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", serve_host);
  serve_cmd->add_option("--max-res", serve_opts.max_resolution)->check(CLI::Range(2, 4096));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train_cmd) {
      RunConfig cfg = RunConfig::load(train_config);
      if (train_steps > 0) cfg.train.steps = train_steps;
      const auto shapes = cfg.resolved_dataset();
      const auto samples = build_training_samples(cfg);
      const long every = std::max<long>(cfg.train.steps / 20, 1);
      TrainResult result = train(samples, cfg.train, cfg.network, [&](const HistoryRow& row) {
        if (!quiet && (row.step % every == 0 || row.step + 1 == cfg.train.steps)) {
          std::cerr << "step " << row.step << " loss " << row.loss << " deepest fine mse "
                    << row.fine_mse.back() << "\n";
        }
      });
      Checkpoint ckpt{std::move(result.params), std::move(result.codebook), {}};
      for (const auto& s : shapes) ckpt.shape_names.push_back(s.name);
      save_checkpoint(ckpt, train_out);
      if (!train_history.empty()) {
        std::ostringstream csv;
        write_history_csv(csv, result.history);
        write_file_atomic(train_history, csv.str());
      }
      std::cout << "wrote " << train_out << "\n";
    } else if (*sample_cmd) {
      SdfOracle oracle;
      if (!sample_obj.empty()) {
        oracle = make_oracle(std::make_shared<const MeshSdf>(load_obj(sample_obj)));
      } else if (!sample_analytic.empty()) {
        oracle = make_oracle(AnalyticShape::from_json(json::parse(sample_analytic)));
      } else {
        bool found = false;
        for (const auto& [name, shape] : default_shape_set()) {
          if (name == sample_shape) {
            oracle = make_oracle(shape);
            found = true;
          }
        }
        if (!found) throw std::invalid_argument("unknown shape '" + sample_shape + "'");
      }
      SamplingConfig sc;
      sc.total = sample_total;
      sc.fine_fraction = sample_fine;
      save_samples(sample_training_set(oracle, sc, sample_seed), sample_out);
    } else if (*fit_cmd) {
      const Checkpoint ckpt = load_checkpoint(fit_ckpt);
      const SdfSampleSet samples = load_samples(fit_samples);
      FitConfig fc;
      fc.seed = fit_seed;
      if (fit_steps >= 0) fc.steps = fit_steps;
      const LatentCode l = fit_mask.empty()
                               ? fit_latent(ckpt.params, samples, fc)
                               : fit_latent_masked(ckpt.params, samples, parse_mask(fit_mask), fc);
      write_file_atomic(fit_out, dump_json({{"latent", std::vector<double>(l.data(), l.data() + l.size())}}));
    } else if (*mesh_cmd) {
      const Checkpoint ckpt = load_checkpoint(mesh_ckpt);
      const int top = ckpt.params.config.layers - 1;
      if (mesh_level > top) throw std::invalid_argument("--level must lie in [1, " + std::to_string(top) + "]");
      LatentCode latent;
      if (!mesh_latent_file.empty()) {
        latent = read_latent_file(mesh_latent_file, ckpt.params.config.latent_dim);
      } else {
        if (mesh_shape < 0) throw std::invalid_argument("one of --shape-id, --latent-file is required");
        if (static_cast<std::size_t>(mesh_shape) >= ckpt.codebook.size()) {
          throw std::invalid_argument("--shape-id outside the codebook");
        }
        latent = ckpt.codebook.row(static_cast<std::size_t>(mesh_shape));
      }
      MeshingConfig mc;
      mc.base_resolution = std::min(mesh_base, mesh_res);
      mc.target_resolution = mesh_res;
      mc.subdivision_factor = mesh_kappa;
      mc.reuse_threshold = mesh_tau;
      mc.validate();
      Extraction ex;
      json stats;
      if (mesh_refine > 0) {
        if (mesh_refine >= mesh_level) throw std::invalid_argument("--refine-from must be below --level");
        const Extraction cached = extract_level(ckpt.params, latent, mesh_refine, mc);
        ex = refine_level(ckpt.params, latent, mesh_refine, mesh_level, cached.grid, mc);
        stats = ex.stats.to_json();
        stats["cached_level"] = mesh_refine;
        stats["cached_evals"] = cached.stats.evaluations;
      } else {
        ex = extract_level(ckpt.params, latent, mesh_level, mc);
        stats = ex.stats.to_json();
      }
      stats["level"] = mesh_level;
      save_obj(ex.mesh, mesh_out);
      const fs::path stats_path =
          mesh_stats.empty() ? fs::path(mesh_out).replace_extension(".stats.json") : fs::path(mesh_stats);
      write_file_atomic(stats_path, dump_json(stats));
    } else if (*metrics_cmd) {
      const Checkpoint ckpt = load_checkpoint(metrics_ckpt);
      const RunConfig cfg = RunConfig::load(metrics_config);
      const auto shapes = cfg.resolved_dataset();
      if (shapes.size() != ckpt.codebook.size()) {
        throw std::invalid_argument("config dataset has " + std::to_string(shapes.size()) +
                                    " shapes, checkpoint codebook has " +
                                    std::to_string(ckpt.codebook.size()));
      }
      std::vector<LatentCode> latents;
      std::vector<SdfOracle> oracles;
      for (std::size_t s = 0; s < shapes.size(); ++s) {
        latents.push_back(ckpt.codebook.row(s));
        oracles.push_back(shapes[s].oracle());
      }
      const MetricReport report = depth_sweep_report(ckpt.params, latents, oracles, cfg.metrics);
      std::ostringstream csv;
      report.write_csv(csv);
      write_file_atomic(metrics_out, csv.str());
      if (!metrics_summary.empty()) write_file_atomic(metrics_summary, dump_json(report.summary()));
      std::cout << csv.str();
    } else if (*spectrum_cmd) {
      const Checkpoint ckpt = load_checkpoint(spectrum_ckpt);
      const int top = ckpt.params.config.layers - 1;
      if (spectrum_level > top) throw std::invalid_argument("--level must lie in [1, " + std::to_string(top) + "]");
      if (static_cast<std::size_t>(spectrum_shape) >= ckpt.codebook.size()) {
        throw std::invalid_argument("--shape-id outside the codebook");
      }
      const NetworkField field(ckpt.params, ckpt.codebook.row(static_cast<std::size_t>(spectrum_shape)),
                               spectrum_level);
      const double bound = ckpt.params.cumulative_bound(spectrum_level);
      const auto fractions = band_limit_fractions(make_batch_sdf(field), bound, band);
      const double worst = *std::max_element(fractions.begin(), fractions.end());
      std::cout << dump_json({{"level", spectrum_level},
                              {"bound", bound},
                              {"cutoff", band.margin * bound},
                              {"fractions", fractions},
                              {"max_fraction", worst}});
    } else if (*serve_cmd) {
      MeshService service(load_checkpoint(serve_ckpt), serve_opts);
      httplib::Server server;
      service.mount(server);
      const int port = serve_port == 0 ? server.bind_to_any_port(serve_host) : serve_port;
      if (serve_port != 0 && !server.bind_to_port(serve_host, port)) {
        throw std::runtime_error("cannot bind " + serve_host + ":" + std::to_string(port));
      }
      std::cout << "listening on " << serve_host << ":" << port << std::endl;
      if (!server.listen_after_bind()) throw std::runtime_error("server stopped with an error");
    }
  } catch (const std::exception& e) {
    std::cerr << "lodsdf: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lodsdf
