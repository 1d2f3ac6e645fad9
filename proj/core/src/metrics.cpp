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

#include "lodsdf/metrics.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

namespace lodsdf {
namespace {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;
using BoostPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using Tree = bgi::rtree<std::pair<BoostPoint, std::size_t>, bgi::quadratic<16>>;

BoostPoint to_boost(const Vec3& p) { return {p.x(), p.y(), p.z()}; }

Tree build_tree(std::span<const Vec3> points) {
  std::vector<std::pair<BoostPoint, std::size_t>> entries;
  entries.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) entries.emplace_back(to_boost(points[i]), i);
  return Tree(entries.begin(), entries.end());
}

double mean_nearest_squared(std::span<const Vec3> from, std::span<const Vec3> to,
                            const Tree& tree) {
  double sum = 0.0;
  std::vector<std::pair<BoostPoint, std::size_t>> hit;
  for (const Vec3& p : from) {
    hit.clear();
    tree.query(bgi::nearest(to_boost(p), 1), std::back_inserter(hit));
    sum += (p - to[hit.front().second]).squaredNorm();
  }
  return sum / double(from.size());
}

void require_non_empty(std::span<const Vec3> a, std::span<const Vec3> b, const char* what) {
  if (a.empty() || b.empty()) throw std::invalid_argument(std::string(what) + ": empty point set");
}

}  // namespace

double chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
  require_non_empty(a, b, "chamfer");
  const Tree tree_a = build_tree(a);
  const Tree tree_b = build_tree(b);
  return (mean_nearest_squared(a, b, tree_b) + mean_nearest_squared(b, a, tree_a)) * 1e5;
}

double chamfer_brute_force(std::span<const Vec3> a, std::span<const Vec3> b) {
  require_non_empty(a, b, "chamfer");
  auto one_way = [](std::span<const Vec3> from, std::span<const Vec3> to) {
    double sum = 0.0;
    for (const Vec3& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& q : to) best = std::min(best, (p - q).squaredNorm());
      sum += best;
    }
    return sum / double(from.size());
  };
  return (one_way(a, b) + one_way(b, a)) * 1e5;
}

double surface_regularity(const TriangleMesh& mesh) {
  const std::size_t n = mesh.vertices.size();
  std::vector<std::vector<std::uint32_t>> ring(n);
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const std::uint32_t u = t[static_cast<std::size_t>(e)];
      const std::uint32_t v = t[static_cast<std::size_t>((e + 1) % 3)];
      if (u >= n || v >= n) throw std::invalid_argument("surface_regularity: index out of range");
      ++edge_use[std::minmax(u, v)];
      ring[u].push_back(v);
      ring[v].push_back(u);
    }
  }
  std::vector<bool> boundary(n, false);
  for (const auto& [edge, count] : edge_use) {
    if (count == 1) boundary[edge.first] = boundary[edge.second] = true;
  }
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t v = 0; v < n; ++v) {
    auto& r = ring[v];
    if (r.empty() || boundary[v]) continue;
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    Vec3 mean = Vec3::Zero();
    for (const auto u : r) mean += mesh.vertices[u];
    mean /= double(r.size());
    sum += (mean - mesh.vertices[v]).norm();
    ++counted;
  }
  if (counted == 0) throw std::invalid_argument("surface_regularity: no interior vertex");
  return sum / double(counted) * 1e3;
}

}  // namespace lodsdf
