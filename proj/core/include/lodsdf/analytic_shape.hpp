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

#include <memory>
#include <utility>

#include <nlohmann/json.hpp>

#include "lodsdf/geometry.hpp"

namespace lodsdf {

enum class ShapeKind { kSphere, kBox, kTorus, kCapsule, kSmoothUnion };

// Closed-form signed distance fields used as ground truth. Every shape must fit
// inside the [-0.5, 0.5]^3 normalization box; construction fails otherwise.
class AnalyticShape {
 public:
  static AnalyticShape sphere(const Vec3& center, double radius);
  static AnalyticShape box(const Vec3& center, const Vec3& half_extents);
  // Torus around the z axis through `center`.
  static AnalyticShape torus(const Vec3& center, double major_radius, double minor_radius);
  static AnalyticShape capsule(const Vec3& a, const Vec3& b, double radius);
  // Polynomial smooth minimum of two shapes with blend radius `blend`. The
  // result is 1-Lipschitz but only approximately a distance inside the blend.
  static AnalyticShape smooth_union(const AnalyticShape& a, const AnalyticShape& b,
                                    double blend);

  ShapeKind kind() const { return kind_; }

  // Signed distance, negative inside.
  double operator()(const Vec3& x) const;

  // Axis-aligned bounding box of the zero level set.
  std::pair<Vec3, Vec3> bounds() const;

  nlohmann::json to_json() const;
  static AnalyticShape from_json(const nlohmann::json& j);

 private:
  AnalyticShape() = default;
  void check_in_unit_box() const;

  ShapeKind kind_ = ShapeKind::kSphere;
  Vec3 p0_ = Vec3::Zero();
  Vec3 p1_ = Vec3::Zero();
  double r0_ = 0.0;
  double r1_ = 0.0;
  std::shared_ptr<const AnalyticShape> lhs_;
  std::shared_ptr<const AnalyticShape> rhs_;
};

const char* to_string(ShapeKind kind);

// Eight shapes used as the default desk-scale training set, in a fixed order.
// The first entry is a centered sphere of radius 0.35.
std::vector<std::pair<std::string, AnalyticShape>> default_shape_set();

}  // namespace lodsdf
