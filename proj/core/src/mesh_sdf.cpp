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

#include "lodsdf/mesh_sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lodsdf {

// Closest point on triangle, following Ericson, Real-Time Collision Detection 5.1.5.
double point_triangle_squared_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                                       const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return ap.squaredNorm();

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return bp.squaredNorm();

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return (p - (a + v * ab)).squaredNorm();
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return cp.squaredNorm();

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return (p - (a + w * ac)).squaredNorm();
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + w * (c - b))).squaredNorm();
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return (p - (a + ab * v + ac * w)).squaredNorm();
}

bool ray_hits_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                       const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-14) return false;
  const double inv = 1.0 / det;
  const Vec3 tvec = origin - a;
  const double u = tvec.dot(pvec) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  return e2.dot(qvec) * inv > 0.0;
}

const std::array<Vec3, 3>& parity_ray_directions() {
  static const std::array<Vec3, 3> dirs = {
      Vec3(1.0, 0.1372, 0.2913).normalized(),
      Vec3(-0.2114, 1.0, 0.1731).normalized(),
      Vec3(0.1571, -0.2633, 1.0).normalized(),
  };
  return dirs;
}

struct MeshSdf::Bvh {
  struct Node {
    Eigen::AlignedBox3d box;
    std::uint32_t first = 0;  // leaf: first index into order; inner: left child
    std::uint32_t count = 0;  // 0 for inner nodes
    std::uint32_t right = 0;
  };
  std::vector<Node> nodes;
  std::vector<std::uint32_t> order;

  static constexpr std::uint32_t kLeafSize = 4;

  void build(const TriangleMesh& mesh) {
    const auto n = static_cast<std::uint32_t>(mesh.triangles.size());
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    std::vector<Vec3> centroid(n);
    std::vector<Eigen::AlignedBox3d> tri_box(n);
    for (std::uint32_t t = 0; t < n; ++t) {
      const auto& tri = mesh.triangles[t];
      tri_box[t].setEmpty();
      centroid[t].setZero();
      for (auto v : tri) {
        tri_box[t].extend(mesh.vertices[v]);
        centroid[t] += mesh.vertices[v] / 3.0;
      }
    }
    nodes.reserve(2 * n / kLeafSize + 1);
    build_range(0, n, centroid, tri_box);
  }

  std::uint32_t build_range(std::uint32_t begin, std::uint32_t end,
                            const std::vector<Vec3>& centroid,
                            const std::vector<Eigen::AlignedBox3d>& tri_box) {
    const auto idx = static_cast<std::uint32_t>(nodes.size());
    nodes.emplace_back();
    Eigen::AlignedBox3d box;
    box.setEmpty();
    Eigen::AlignedBox3d cbox;
    cbox.setEmpty();
    for (auto k = begin; k < end; ++k) {
      box.extend(tri_box[order[k]]);
      cbox.extend(centroid[order[k]]);
    }
    nodes[idx].box = box;
    if (end - begin <= kLeafSize) {
      nodes[idx].first = begin;
      nodes[idx].count = end - begin;
      return idx;
    }
    int axis = 0;
    cbox.sizes().maxCoeff(&axis);
    const auto mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return centroid[a][axis] < centroid[b][axis];
                     });
    const auto left = build_range(begin, mid, centroid, tri_box);
    const auto right = build_range(mid, end, centroid, tri_box);
    nodes[idx].first = left;
    nodes[idx].right = right;
    return idx;
  }

  static bool ray_box(const Eigen::AlignedBox3d& box, const Vec3& o, const Vec3& inv_dir) {
    double tmin = 0.0;
    double tmax = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
      double t0 = (box.min()[a] - o[a]) * inv_dir[a];
      double t1 = (box.max()[a] - o[a]) * inv_dir[a];
      if (t0 > t1) std::swap(t0, t1);
      tmin = std::max(tmin, t0);
      tmax = std::min(tmax, t1);
      if (tmin > tmax) return false;
    }
    return true;
  }
};

MeshSdf::MeshSdf(TriangleMesh mesh) : mesh_(std::move(mesh)), bvh_(std::make_unique<Bvh>()) {
  if (mesh_.empty()) throw GeometryError("mesh SDF needs a non-empty mesh");
  mesh_.validate();
  if (!is_watertight(mesh_)) {
    throw GeometryError("mesh is not watertight: every edge must be shared by exactly 2 triangles");
  }
  bvh_->build(mesh_);
}

MeshSdf::~MeshSdf() = default;
MeshSdf::MeshSdf(MeshSdf&&) noexcept = default;
MeshSdf& MeshSdf::operator=(MeshSdf&&) noexcept = default;

double MeshSdf::unsigned_distance(const Vec3& x) const {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const auto& node = bvh_->nodes[stack.back()];
    stack.pop_back();
    if (node.box.squaredExteriorDistance(x) > best) continue;
    if (node.count > 0) {
      for (auto k = node.first; k < node.first + node.count; ++k) {
        const auto& tri = mesh_.triangles[bvh_->order[k]];
        best = std::min(best, point_triangle_squared_distance(x, mesh_.vertices[tri[0]],
                                                              mesh_.vertices[tri[1]],
                                                              mesh_.vertices[tri[2]]));
      }
      continue;
    }
    // Visit the nearer child first.
    const auto l = node.first;
    const auto r = node.right;
    const double dl = bvh_->nodes[l].box.squaredExteriorDistance(x);
    const double dr = bvh_->nodes[r].box.squaredExteriorDistance(x);
    if (dl < dr) {
      stack.push_back(r);
      stack.push_back(l);
    } else {
      stack.push_back(l);
      stack.push_back(r);
    }
  }
  return std::sqrt(best);
}

std::size_t MeshSdf::crossings(const Vec3& x, const Vec3& dir) const {
  const Vec3 inv = dir.cwiseInverse();
  std::size_t hits = 0;
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const auto& node = bvh_->nodes[stack.back()];
    stack.pop_back();
    if (!Bvh::ray_box(node.box, x, inv)) continue;
    if (node.count > 0) {
      for (auto k = node.first; k < node.first + node.count; ++k) {
        const auto& tri = mesh_.triangles[bvh_->order[k]];
        if (ray_hits_triangle(x, dir, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]],
                              mesh_.vertices[tri[2]])) {
          ++hits;
        }
      }
      continue;
    }
    stack.push_back(node.first);
    stack.push_back(node.right);
  }
  return hits;
}

double MeshSdf::operator()(const Vec3& x) const {
  int inside_votes = 0;
  for (const auto& dir : parity_ray_directions()) {
    if (crossings(x, dir) % 2 == 1) ++inside_votes;
  }
  const double d = unsigned_distance(x);
  return inside_votes >= 2 ? -d : d;
}

}  // namespace lodsdf
