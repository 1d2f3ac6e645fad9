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

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "lodsdf/detail/byte_io.hpp"
#include "lodsdf/geometry.hpp"
#include "lodsdf/sampling.hpp"

namespace lodsdf {

void TriangleMesh::validate() const {
  const auto n = vertices.size();
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (auto idx : triangles[t]) {
      if (idx >= n) {
        throw GeometryError("triangle " + std::to_string(t) + " references vertex " +
                            std::to_string(idx) + " of " + std::to_string(n));
      }
    }
  }
}

bool is_watertight(const TriangleMesh& mesh) {
  if (mesh.empty()) return false;
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      auto a = tri[e];
      auto b = tri[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_use[{a, b}];
    }
  }
  return std::all_of(edge_use.begin(), edge_use.end(),
                     [](const auto& kv) { return kv.second == 2; });
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

std::vector<Vec3> sample_surface_points(const TriangleMesh& mesh, std::size_t n,
                                        std::uint64_t seed) {
  if (mesh.empty()) throw GeometryError("cannot sample points on an empty mesh");
  mesh.validate();
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    total += triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    cumulative[t] = total;
  }
  if (!(total > 0.0)) throw GeometryError("mesh has zero surface area");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> points;
  points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double pick = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const auto& tri = mesh.triangles[static_cast<std::size_t>(it - cumulative.begin())];
    double u = unit(rng);
    double v = unit(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const Vec3& a = mesh.vertices[tri[0]];
    points.push_back(a + u * (mesh.vertices[tri[1]] - a) + v * (mesh.vertices[tri[2]] - a));
  }
  return points;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw GeometryError("OBJ parse error at line " + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view tok, std::size_t line_no) {
  // from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    parse_fail(line_no, "bad number '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

TriangleMesh parse_obj(const std::string& text) {
  TriangleMesh mesh;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) parse_fail(line_no, "vertex needs 3 coordinates");
      mesh.vertices.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                                 parse_double(tok[3], line_no));
    } else if (tok[0] == "f") {
      if (tok.size() < 4) parse_fail(line_no, "face needs at least 3 vertices");
      std::vector<std::uint32_t> face;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        const auto idx_tok = tok[k].substr(0, tok[k].find('/'));
        long long idx = 0;
        auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
        if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx == 0) {
          parse_fail(line_no, "bad face index '" + std::string(tok[k]) + "'");
        }
        const long long n = static_cast<long long>(mesh.vertices.size());
        const long long resolved = idx > 0 ? idx - 1 : n + idx;
        if (resolved < 0 || resolved >= n) {
          parse_fail(line_no, "face index " + std::to_string(idx) + " out of range");
        }
        face.push_back(static_cast<std::uint32_t>(resolved));
      }
      for (std::size_t k = 1; k + 1 < face.size(); ++k) {
        mesh.triangles.push_back({face[0], face[k], face[k + 1]});
      }
    }
    // Other record types (vn, vt, o, g, s, usemtl, ...) carry nothing we use.
  }
  return mesh;
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GeometryError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_obj(ss.str());
}

std::string format_obj(const TriangleMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 60 + mesh.triangles.size() * 24);
  char buf[128];
  for (const auto& v : mesh.vertices) {
    const int n = std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out.append(buf, static_cast<std::size_t>(n));
  }
  for (const auto& t : mesh.triangles) {
    const int n = std::snprintf(buf, sizeof(buf), "f %u %u %u\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  mesh.validate();
  write_file_atomic(path, format_obj(mesh));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

// ---- sample sets ----

namespace {
constexpr std::uint32_t kSamplesVersion = 1;
}

std::string encode_samples(const SdfSampleSet& samples) {
  detail::ByteWriter w;
  w.bytes("SDFS");
  w.u32(kSamplesVersion);
  w.u64(samples.fine.size());
  w.u64(samples.coarse.size());
  for (const auto* group : {&samples.fine, &samples.coarse}) {
    for (const auto& s : *group) {
      w.f32(static_cast<float>(s.position.x()));
      w.f32(static_cast<float>(s.position.y()));
      w.f32(static_cast<float>(s.position.z()));
      w.f32(static_cast<float>(s.distance));
    }
  }
  return w.take();
}

SdfSampleSet decode_samples(const std::string& bytes) {
  detail::ByteReader r(bytes);
  try {
    if (r.bytes(4) != "SDFS") throw GeometryError("sample file: bad magic");
    const auto version = r.u32();
    if (version != kSamplesVersion) {
      throw GeometryError("sample file: unsupported version " + std::to_string(version));
    }
    const auto n_fine = r.u64();
    const auto n_coarse = r.u64();
    if (r.remaining() / 16 < n_fine + n_coarse || r.remaining() != 16 * (n_fine + n_coarse)) {
      throw GeometryError("sample file: payload size does not match header counts");
    }
    SdfSampleSet out;
    for (auto [group, count] : {std::pair{&out.fine, n_fine}, std::pair{&out.coarse, n_coarse}}) {
      group->resize(count);
      for (auto& s : *group) {
        const double x = r.f32();
        const double y = r.f32();
        const double z = r.f32();
        s.position = Vec3(x, y, z);
        s.distance = r.f32();
      }
    }
    return out;
  } catch (const GeometryError&) {
    throw;
  } catch (const std::exception& e) {
    throw GeometryError(std::string("sample file: ") + e.what());
  }
}

void save_samples(const SdfSampleSet& samples, const std::filesystem::path& path) {
  write_file_atomic(path, encode_samples(samples));
}

SdfSampleSet load_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GeometryError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_samples(ss.str());
}

}  // namespace lodsdf
