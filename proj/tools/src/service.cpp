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

#include "lodsdf_tools/service.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include <httplib.h>

#include "lodsdf/detail/byte_io.hpp"

namespace lodsdf {
namespace {

using nlohmann::json;

class RequestError : public std::runtime_error {
 public:
  RequestError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

HttpReply json_reply(int status, const json& j) {
  HttpReply r;
  r.status = status;
  r.body = j.dump();
  return r;
}

json parse_body(const std::string& body, const std::set<std::string>& allowed) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    throw RequestError(400, "body is not valid JSON");
  }
  if (!j.is_object()) throw RequestError(400, "body must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw RequestError(400, "unknown field '" + key + "'");
  }
  return j;
}

int integer_field(const json& j, const char* key) {
  if (!j.contains(key)) throw RequestError(400, std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw RequestError(400, std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

double number_field(const json& j, const char* key) {
  if (!j.contains(key)) throw RequestError(400, std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw RequestError(400, std::string("'") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw RequestError(400, std::string("'") + key + "' must be finite");
  return d;
}

template <class F>
HttpReply guarded(F&& f) {
  try {
    return f();
  } catch (const RequestError& e) {
    return json_reply(e.status(), {{"error", e.what()}});
  } catch (const std::exception&) {
    return json_reply(500, {{"error", "internal error"}});
  }
}

// Largest base resolution <= requested base whose power-of-two multiple is `target`.
int base_for(int target, int base) {
  int b = target;
  while (b > base && b % 2 == 0) b /= 2;
  return b;
}

}  // namespace

std::string encode_wire_mesh(const TriangleMesh& mesh) {
  detail::ByteWriter w;
  w.u32(static_cast<std::uint32_t>(mesh.vertices.size()));
  w.u32(static_cast<std::uint32_t>(mesh.triangles.size()));
  for (const auto& v : mesh.vertices) {
    for (int a = 0; a < 3; ++a) w.f32(static_cast<float>(v[a]));
  }
  for (const auto& t : mesh.triangles) {
    for (auto i : t) w.u32(i);
  }
  return w.take();
}

TriangleMesh decode_wire_mesh(const std::string& bytes) {
  detail::ByteReader r(bytes);
  TriangleMesh mesh;
  const std::uint32_t nv = r.u32();
  const std::uint32_t nt = r.u32();
  if (r.remaining() != std::size_t(nv) * 12 + std::size_t(nt) * 12) {
    throw std::runtime_error("wire mesh size mismatch");
  }
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices) {
    for (int a = 0; a < 3; ++a) v[a] = r.f32();
  }
  mesh.triangles.resize(nt);
  for (auto& t : mesh.triangles) {
    for (auto& i : t) i = r.u32();
  }
  return mesh;
}

MeshService::MeshService(Checkpoint checkpoint, ServiceOptions options)
    : checkpoint_(std::move(checkpoint)), options_(options) {
  if (options_.max_resolution < 2) throw std::invalid_argument("max_resolution must be >= 2");
}

HttpReply MeshService::model_info() const {
  const auto& cfg = checkpoint_.params.config;
  return json_reply(200, {{"N", cfg.layers},
                          {"d_h", cfg.hidden_dim},
                          {"d_l", cfg.latent_dim},
                          {"B", cfg.bandwidth},
                          {"B_schedule", cfg.resolved_bounds()},
                          {"conditioning", to_string(cfg.conditioning)},
                          {"levels", cfg.layers - 1},
                          {"max_resolution", options_.max_resolution},
                          {"shape_names", checkpoint_.shape_names}});
}

HttpReply MeshService::shapes() const {
  json list = json::array();
  for (std::size_t i = 0; i < checkpoint_.shape_names.size(); ++i) {
    list.push_back({{"id", i}, {"name", checkpoint_.shape_names[i]}});
  }
  return json_reply(200, {{"shapes", list}});
}

LatentCode MeshService::resolve_source(const json& source) const {
  if (!source.is_object() || source.size() != 1) {
    throw RequestError(400, "source must hold exactly one of shape_id, latent, interpolate");
  }
  const auto rows = static_cast<int>(checkpoint_.codebook.size());
  auto row = [&](const json& j, const char* key) {
    const int id = integer_field(j, key);
    if (id < 0 || id >= rows) {
      throw RequestError(400, std::string("'") + key + "' outside [0, " + std::to_string(rows) + ")");
    }
    return checkpoint_.codebook.row(static_cast<std::size_t>(id));
  };
  if (source.contains("shape_id")) return row(source, "shape_id");
  if (source.contains("latent")) {
    const auto& v = source.at("latent");
    const int d_l = checkpoint_.params.config.latent_dim;
    if (!v.is_array() || static_cast<int>(v.size()) != d_l) {
      throw RequestError(400, "latent must be an array of " + std::to_string(d_l) + " numbers");
    }
    LatentCode l(d_l);
    for (int k = 0; k < d_l; ++k) {
      const auto& e = v.at(static_cast<std::size_t>(k));
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        throw RequestError(400, "latent entries must be finite numbers");
      }
      l[k] = static_cast<double>(e.get<float>());
    }
    return l;
  }
  if (source.contains("interpolate")) {
    const auto& ip = source.at("interpolate");
    if (!ip.is_object()) throw RequestError(400, "interpolate must be an object");
    const LatentCode a = row(ip, "a");
    const LatentCode b = row(ip, "b");
    const double t = number_field(ip, "t");
    if (t < 0.0 || t > 1.0) throw RequestError(400, "interpolate.t must lie in [0, 1]");
    return (1.0 - t) * a + t * b;
  }
  throw RequestError(400, "source must hold exactly one of shape_id, latent, interpolate");
}

int MeshService::resolve_level(const json& body, const char* key) const {
  const int level = integer_field(body, key);
  const int top = checkpoint_.params.config.layers - 1;
  if (level < 1 || level > top) {
    throw RequestError(400, std::string("'") + key + "' = " + std::to_string(level) +
                                " outside [1, " + std::to_string(top) + "]");
  }
  return level;
}

HttpReply MeshService::mesh(const std::string& body) const {
  return guarded([&] {
    const json j = parse_body(body, {"source", "level", "resolution", "refine_from", "tau"});
    if (!j.contains("source")) throw RequestError(400, "missing field 'source'");
    const LatentCode latent = resolve_source(j.at("source"));
    const int level = resolve_level(j, "level");
    const int resolution = integer_field(j, "resolution");
    if (resolution < 2) throw RequestError(400, "resolution must be >= 2");
    if (resolution > options_.max_resolution) {
      throw RequestError(413, "resolution " + std::to_string(resolution) + " exceeds maximum " +
                                  std::to_string(options_.max_resolution));
    }
    MeshingConfig cfg;
    cfg.target_resolution = resolution;
    cfg.base_resolution = base_for(resolution, options_.base_resolution);
    cfg.subdivision_factor = options_.subdivision_factor;
    if (j.contains("tau")) {
      cfg.reuse_threshold = number_field(j, "tau");
      if (cfg.reuse_threshold <= 0.0) throw RequestError(400, "tau must be positive");
    }

    HttpReply reply;
    reply.content_type = "application/octet-stream";
    if (j.contains("refine_from")) {
      const int from = resolve_level(j, "refine_from");
      if (from >= level) throw RequestError(400, "refine_from must be below level");
      const Extraction cached = extract_level(checkpoint_.params, latent, from, cfg);
      const Extraction fine =
          refine_level(checkpoint_.params, latent, from, level, cached.grid, cfg);
      reply.body = encode_wire_mesh(fine.mesh);
      reply.headers["evals"] = std::to_string(fine.stats.evaluations);
      reply.headers["evals-cached"] = std::to_string(cached.stats.evaluations);
    } else {
      const Extraction ex = extract_level(checkpoint_.params, latent, level, cfg);
      reply.body = encode_wire_mesh(ex.mesh);
      reply.headers["evals"] = std::to_string(ex.stats.evaluations);
    }
    return reply;
  });
}

HttpReply MeshService::slice(const std::string& body) const {
  return guarded([&] {
    const json j = parse_body(body, {"source", "level", "axis", "offset", "res"});
    if (!j.contains("source")) throw RequestError(400, "missing field 'source'");
    const LatentCode latent = resolve_source(j.at("source"));
    const int level = resolve_level(j, "level");
    int axis = -1;
    if (j.contains("axis") && j.at("axis").is_string()) {
      const auto s = j.at("axis").get<std::string>();
      axis = s == "x" ? 0 : s == "y" ? 1 : s == "z" ? 2 : -1;
    } else {
      axis = integer_field(j, "axis");
    }
    if (axis < 0 || axis > 2) throw RequestError(400, "axis must be x, y, z or 0..2");
    const double offset = number_field(j, "offset");
    const int res = integer_field(j, "res");
    if (res < 2) throw RequestError(400, "res must be >= 2");
    if (res > options_.max_resolution) {
      throw RequestError(413, "res " + std::to_string(res) + " exceeds maximum " +
                                  std::to_string(options_.max_resolution));
    }
    const int u_axis = axis == 0 ? 1 : 0;
    const int v_axis = axis == 2 ? 1 : 2;
    std::vector<Vec3> points(static_cast<std::size_t>(res) * static_cast<std::size_t>(res));
    const double step = 2.0 * kExtractionHalfExtent / (res - 1);
    for (int v = 0; v < res; ++v) {
      for (int u = 0; u < res; ++u) {
        Vec3 p;
        p[axis] = offset;
        p[u_axis] = -kExtractionHalfExtent + step * u;
        p[v_axis] = -kExtractionHalfExtent + step * v;
        points[static_cast<std::size_t>(v * res + u)] = p;
      }
    }
    std::vector<double> values(points.size());
    NetworkField(checkpoint_.params, latent, level)(points, values);
    detail::ByteWriter w;
    for (double s : values) w.f32(static_cast<float>(s));
    HttpReply reply;
    reply.content_type = "application/octet-stream";
    reply.body = w.take();
    return reply;
  });
}

void MeshService::mount(httplib::Server& server) const {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Expose-Headers", "evals, evals-cached"}});
  auto send = [](const HttpReply& r, httplib::Response& res) {
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(r.body, r.content_type);
  };
  server.Get("/model/info", [this, send](const httplib::Request&, httplib::Response& res) {
    send(model_info(), res);
  });
  server.Get("/shapes", [this, send](const httplib::Request&, httplib::Response& res) {
    send(shapes(), res);
  });
  server.Post("/mesh", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(mesh(req.body), res);
  });
  server.Post("/slice", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(slice(req.body), res);
  });
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.set_exception_handler(
      [send](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
        send(json_reply(500, {{"error", "internal error"}}), res);
      });
}

}  // namespace lodsdf
