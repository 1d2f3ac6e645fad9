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

#include "lodsdf/analytic_shape.hpp"

#include <algorithm>
#include <cmath>

namespace lodsdf {
namespace {

constexpr double kUnitBoxHalf = 0.5;

Vec3 vec_from_json(const nlohmann::json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) {
    throw GeometryError(std::string("shape field '") + key + "' must be a 3-vector");
  }
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

nlohmann::json vec_to_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> keys) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) ==
        keys.end()) {
      throw GeometryError("unknown shape field '" + key + "'");
    }
  }
}

}  // namespace

const char* to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kSphere: return "sphere";
    case ShapeKind::kBox: return "box";
    case ShapeKind::kTorus: return "torus";
    case ShapeKind::kCapsule: return "capsule";
    case ShapeKind::kSmoothUnion: return "smooth_union";
  }
  return "unknown";
}

AnalyticShape AnalyticShape::sphere(const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw GeometryError("sphere radius must be positive");
  AnalyticShape s;
  s.kind_ = ShapeKind::kSphere;
  s.p0_ = center;
  s.r0_ = radius;
  s.check_in_unit_box();
  return s;
}

AnalyticShape AnalyticShape::box(const Vec3& center, const Vec3& half_extents) {
  if (!(half_extents.minCoeff() > 0.0)) throw GeometryError("box half extents must be positive");
  AnalyticShape s;
  s.kind_ = ShapeKind::kBox;
  s.p0_ = center;
  s.p1_ = half_extents;
  s.check_in_unit_box();
  return s;
}

AnalyticShape AnalyticShape::torus(const Vec3& center, double major_radius,
                                   double minor_radius) {
  if (!(minor_radius > 0.0) || !(major_radius > minor_radius)) {
    throw GeometryError("torus needs major radius > minor radius > 0");
  }
  AnalyticShape s;
  s.kind_ = ShapeKind::kTorus;
  s.p0_ = center;
  s.r0_ = major_radius;
  s.r1_ = minor_radius;
  s.check_in_unit_box();
  return s;
}

AnalyticShape AnalyticShape::capsule(const Vec3& a, const Vec3& b, double radius) {
  if (!(radius > 0.0)) throw GeometryError("capsule radius must be positive");
  AnalyticShape s;
  s.kind_ = ShapeKind::kCapsule;
  s.p0_ = a;
  s.p1_ = b;
  s.r0_ = radius;
  s.check_in_unit_box();
  return s;
}

AnalyticShape AnalyticShape::smooth_union(const AnalyticShape& a, const AnalyticShape& b,
                                          double blend) {
  if (!(blend > 0.0)) throw GeometryError("smooth union blend must be positive");
  AnalyticShape s;
  s.kind_ = ShapeKind::kSmoothUnion;
  s.r0_ = blend;
  s.lhs_ = std::make_shared<const AnalyticShape>(a);
  s.rhs_ = std::make_shared<const AnalyticShape>(b);
  s.check_in_unit_box();
  return s;
}

double AnalyticShape::operator()(const Vec3& x) const {
  switch (kind_) {
    case ShapeKind::kSphere:
      return (x - p0_).norm() - r0_;
    case ShapeKind::kBox: {
      const Vec3 q = (x - p0_).cwiseAbs() - p1_;
      return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
    }
    case ShapeKind::kTorus: {
      const Vec3 p = x - p0_;
      const double ring = std::hypot(p.x(), p.y()) - r0_;
      return std::hypot(ring, p.z()) - r1_;
    }
    case ShapeKind::kCapsule: {
      const Vec3 ab = p1_ - p0_;
      const double len2 = ab.squaredNorm();
      const double t = len2 > 0.0 ? std::clamp((x - p0_).dot(ab) / len2, 0.0, 1.0) : 0.0;
      return (x - (p0_ + t * ab)).norm() - r0_;
    }
    case ShapeKind::kSmoothUnion: {
      const double a = (*lhs_)(x);
      const double b = (*rhs_)(x);
      const double h = std::max(r0_ - std::abs(a - b), 0.0) / r0_;
      return std::min(a, b) - h * h * r0_ * 0.25;
    }
  }
  return 0.0;
}

std::pair<Vec3, Vec3> AnalyticShape::bounds() const {
  switch (kind_) {
    case ShapeKind::kSphere:
      return {p0_.array() - r0_, p0_.array() + r0_};
    case ShapeKind::kBox:
      return {p0_ - p1_, p0_ + p1_};
    case ShapeKind::kTorus: {
      const Vec3 ext(r0_ + r1_, r0_ + r1_, r1_);
      return {p0_ - ext, p0_ + ext};
    }
    case ShapeKind::kCapsule:
      return {p0_.cwiseMin(p1_).array() - r0_, p0_.cwiseMax(p1_).array() + r0_};
    case ShapeKind::kSmoothUnion: {
      // smin lies at most blend/4 below min(a, b).
      const auto [alo, ahi] = lhs_->bounds();
      const auto [blo, bhi] = rhs_->bounds();
      const double grow = 0.25 * r0_;
      return {alo.cwiseMin(blo).array() - grow, ahi.cwiseMax(bhi).array() + grow};
    }
  }
  return {Vec3::Zero(), Vec3::Zero()};
}

void AnalyticShape::check_in_unit_box() const {
  const auto [lo, hi] = bounds();
  if (lo.minCoeff() < -kUnitBoxHalf || hi.maxCoeff() > kUnitBoxHalf) {
    throw GeometryError(std::string(to_string(kind_)) +
                        " does not fit inside the [-0.5, 0.5]^3 box");
  }
}

nlohmann::json AnalyticShape::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  switch (kind_) {
    case ShapeKind::kSphere:
      j["center"] = vec_to_json(p0_);
      j["radius"] = r0_;
      break;
    case ShapeKind::kBox:
      j["center"] = vec_to_json(p0_);
      j["half_extents"] = vec_to_json(p1_);
      break;
    case ShapeKind::kTorus:
      j["center"] = vec_to_json(p0_);
      j["major_radius"] = r0_;
      j["minor_radius"] = r1_;
      break;
    case ShapeKind::kCapsule:
      j["a"] = vec_to_json(p0_);
      j["b"] = vec_to_json(p1_);
      j["radius"] = r0_;
      break;
    case ShapeKind::kSmoothUnion:
      j["first"] = lhs_->to_json();
      j["second"] = rhs_->to_json();
      j["blend"] = r0_;
      break;
  }
  return j;
}

AnalyticShape AnalyticShape::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sphere") {
    require_keys(j, {"kind", "center", "radius"});
    return sphere(vec_from_json(j, "center"), j.at("radius").get<double>());
  }
  if (kind == "box") {
    require_keys(j, {"kind", "center", "half_extents"});
    return box(vec_from_json(j, "center"), vec_from_json(j, "half_extents"));
  }
  if (kind == "torus") {
    require_keys(j, {"kind", "center", "major_radius", "minor_radius"});
    return torus(vec_from_json(j, "center"), j.at("major_radius").get<double>(),
                 j.at("minor_radius").get<double>());
  }
  if (kind == "capsule") {
    require_keys(j, {"kind", "a", "b", "radius"});
    return capsule(vec_from_json(j, "a"), vec_from_json(j, "b"), j.at("radius").get<double>());
  }
  if (kind == "smooth_union") {
    require_keys(j, {"kind", "first", "second", "blend"});
    return smooth_union(from_json(j.at("first")), from_json(j.at("second")),
                        j.at("blend").get<double>());
  }
  throw GeometryError("unknown shape kind '" + kind + "'");
}

std::vector<std::pair<std::string, AnalyticShape>> default_shape_set() {
  using S = AnalyticShape;
  return {
      {"sphere", S::sphere(Vec3::Zero(), 0.35)},
      {"box", S::box(Vec3::Zero(), Vec3(0.3, 0.2, 0.25))},
      {"torus", S::torus(Vec3::Zero(), 0.28, 0.1)},
      {"capsule", S::capsule(Vec3(-0.25, 0.0, 0.0), Vec3(0.25, 0.0, 0.0), 0.15)},
      {"blob", S::smooth_union(S::sphere(Vec3(-0.15, 0.0, 0.0), 0.2),
                               S::sphere(Vec3(0.18, 0.05, 0.0), 0.15), 0.1)},
      {"cube", S::box(Vec3(0.0, 0.0, 0.05), Vec3(0.22, 0.22, 0.22))},
      {"fat_torus", S::torus(Vec3::Zero(), 0.25, 0.15)},
      {"slanted_capsule",
       S::capsule(Vec3(-0.2, -0.2, -0.1), Vec3(0.2, 0.2, 0.1), 0.12)},
  };
}

}  // namespace lodsdf
