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

#include "lodsdf/config.hpp"

#include <fstream>
#include <set>

#include "lodsdf/mesh_sdf.hpp"

namespace lodsdf {
namespace {

using nlohmann::json;

// Reads known keys from one JSON object and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + name_ + "." + key + "' has the wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown config key '" + name_ + "." + key + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

SdfOracle ShapeSource::oracle() const {
  if (analytic) return make_oracle(*analytic);
  return make_oracle(std::make_shared<const MeshSdf>(load_obj(obj)));
}

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  Section top(j, "root");
  top.read("seed", c.seed);
  if (const json* n = top.child("network")) {
    Section s(*n, "network");
    s.read("layers", c.network.layers);
    s.read("hidden_dim", c.network.hidden_dim);
    s.read("latent_dim", c.network.latent_dim);
    s.read("bandwidth", c.network.bandwidth);
    s.read("bounds", c.network.bounds);
    std::string cond = to_string(c.network.conditioning);
    s.read("conditioning", cond);
    c.network.conditioning = conditioning_from_string(cond);
    s.finish();
  }
  if (const json* t = top.child("train")) {
    Section s(*t, "train");
    s.read("steps", c.train.steps);
    s.read("batch_shapes", c.train.batch_shapes);
    s.read("samples_per_shape", c.train.samples_per_shape);
    s.read("lambda_coarse", c.train.lambda_coarse);
    s.read("lambda_reg", c.train.lambda_reg);
    s.read("lr_start", c.train.lr_start);
    s.read("lr_end", c.train.lr_end);
    s.read("codebook_init_std", c.train.codebook_init_std);
    s.read("history_every", c.train.history_every);
    s.finish();
  }
  if (const json* t = top.child("sampling")) {
    Section s(*t, "sampling");
    s.read("total", c.sampling.total);
    s.read("fine_fraction", c.sampling.fine_fraction);
    s.read("near_sigma", c.sampling.near_sigma);
    s.read("far_sigma", c.sampling.far_sigma);
    s.read("uniform_fraction", c.sampling.uniform_fraction);
    s.read("uniform_half_extent", c.sampling.uniform_half_extent);
    s.finish();
  }
  if (const json* t = top.child("meshing")) {
    Section s(*t, "meshing");
    s.read("base_resolution", c.meshing.base_resolution);
    s.read("target_resolution", c.meshing.target_resolution);
    s.read("subdivision_factor", c.meshing.subdivision_factor);
    s.read("reuse_threshold", c.meshing.reuse_threshold);
    s.read("iso", c.meshing.iso);
    s.finish();
  }
  if (const json* t = top.child("fit")) {
    Section s(*t, "fit");
    s.read("steps", c.fit.steps);
    s.read("lr", c.fit.lr);
    s.read("lr_final", c.fit.lr_final);
    s.read("decay_start", c.fit.decay_start);
    s.read("samples_per_step", c.fit.samples_per_step);
    s.read("lambda_coarse", c.fit.lambda_coarse);
    s.read("lambda_reg", c.fit.lambda_reg);
    s.finish();
  }
  if (const json* t = top.child("metrics")) {
    Section s(*t, "metrics");
    s.read("chamfer_points", c.metrics.chamfer_points);
    s.read("emd_points", c.metrics.emd_points);
    s.read("exact_emd_limit", c.metrics.exact_emd_limit);
    s.read("base_resolution", c.metrics.meshing.base_resolution);
    s.read("resolution", c.metrics.meshing.target_resolution);
    s.read("subdivision_factor", c.metrics.meshing.subdivision_factor);
    s.read("trend_band", c.metrics.trend_band);
    s.finish();
  }
  if (const json* d = top.child("dataset")) {
    if (!d->is_array()) throw ConfigError("config key 'root.dataset' must be an array");
    for (const auto& entry : *d) {
      Section s(entry, "dataset[]");
      ShapeSource src;
      s.read("name", src.name);
      const json* shape = s.child("shape");
      std::string obj;
      s.read("obj", obj);
      s.finish();
      if (src.name.empty()) throw ConfigError("dataset entry needs a name");
      if ((shape != nullptr) == !obj.empty()) {
        throw ConfigError("dataset entry '" + src.name + "' needs exactly one of shape, obj");
      }
      if (shape) {
        try {
          src.analytic = AnalyticShape::from_json(*shape);
        } catch (const std::exception& e) {
          throw ConfigError("dataset entry '" + src.name + "': " + e.what());
        }
      } else {
        src.obj = std::filesystem::path(obj).is_absolute() ? std::filesystem::path(obj)
                                                           : base_dir / obj;
      }
      c.dataset.push_back(std::move(src));
    }
  }
  top.finish();
  c.train.seed = c.seed;
  c.fit.seed = c.seed;
  c.metrics.seed = c.seed;
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, path.parent_path());
}

json RunConfig::to_json() const {
  json dataset_json = json::array();
  for (const auto& s : dataset) {
    json e = {{"name", s.name}};
    if (s.analytic) {
      e["shape"] = s.analytic->to_json();
    } else {
      e["obj"] = s.obj.string();
    }
    dataset_json.push_back(e);
  }
  return {
      {"seed", seed},
      {"network",
       {{"layers", network.layers},
        {"hidden_dim", network.hidden_dim},
        {"latent_dim", network.latent_dim},
        {"bandwidth", network.bandwidth},
        {"bounds", network.bounds},
        {"conditioning", to_string(network.conditioning)}}},
      {"train",
       {{"steps", train.steps},
        {"batch_shapes", train.batch_shapes},
        {"samples_per_shape", train.samples_per_shape},
        {"lambda_coarse", train.lambda_coarse},
        {"lambda_reg", train.lambda_reg},
        {"lr_start", train.lr_start},
        {"lr_end", train.lr_end},
        {"codebook_init_std", train.codebook_init_std},
        {"history_every", train.history_every}}},
      {"sampling",
       {{"total", sampling.total},
        {"fine_fraction", sampling.fine_fraction},
        {"near_sigma", sampling.near_sigma},
        {"far_sigma", sampling.far_sigma},
        {"uniform_fraction", sampling.uniform_fraction},
        {"uniform_half_extent", sampling.uniform_half_extent}}},
      {"meshing",
       {{"base_resolution", meshing.base_resolution},
        {"target_resolution", meshing.target_resolution},
        {"subdivision_factor", meshing.subdivision_factor},
        {"reuse_threshold", meshing.reuse_threshold},
        {"iso", meshing.iso}}},
      {"fit",
       {{"steps", fit.steps},
        {"lr", fit.lr},
        {"lr_final", fit.lr_final},
        {"decay_start", fit.decay_start},
        {"samples_per_step", fit.samples_per_step},
        {"lambda_coarse", fit.lambda_coarse},
        {"lambda_reg", fit.lambda_reg}}},
      {"metrics",
       {{"chamfer_points", metrics.chamfer_points},
        {"emd_points", metrics.emd_points},
        {"exact_emd_limit", metrics.exact_emd_limit},
        {"base_resolution", metrics.meshing.base_resolution},
        {"resolution", metrics.meshing.target_resolution},
        {"subdivision_factor", metrics.meshing.subdivision_factor},
        {"trend_band", metrics.trend_band}}},
      {"dataset", dataset_json},
  };
}

std::vector<ShapeSource> RunConfig::resolved_dataset() const {
  if (!dataset.empty()) return dataset;
  std::vector<ShapeSource> out;
  for (auto& [name, shape] : default_shape_set()) out.push_back({name, shape, {}});
  return out;
}

void RunConfig::validate() const {
  network.validate();
  train.validate();
  meshing.validate();
  metrics.meshing.validate();
  if (fit.steps < 0) throw ConfigError("fit.steps must be >= 0");
  if (!(fit.decay_start >= 0.0 && fit.decay_start <= 1.0)) {
    throw ConfigError("fit.decay_start must lie in [0, 1]");
  }
  if (sampling.total < 20) throw ConfigError("sampling.total must be >= 20");
  if (!(sampling.fine_fraction > 0.0 && sampling.fine_fraction < 1.0)) {
    throw ConfigError("sampling.fine_fraction must lie in (0, 1)");
  }
  if (metrics.chamfer_points == 0 || metrics.emd_points == 0) {
    throw ConfigError("metrics point counts must be positive");
  }
}

std::vector<SdfSampleSet> build_training_samples(const RunConfig& config) {
  std::vector<SdfSampleSet> out;
  const auto shapes = config.resolved_dataset();
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    SdfSampleSet set = sample_training_set(shapes[k].oracle(), config.sampling, config.seed + k);
    set.shape_id = static_cast<int>(k);
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace lodsdf
