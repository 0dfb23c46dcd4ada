// SPDX-License-Identifier: MIT

#include "sixdof/mesh.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sixdof/error.h"

namespace sixdof {

void Mesh::validate() const {
  if (triangles.empty()) {
    throw Error(ErrorCode::kEmptyMesh, "mesh has no triangles");
  }
  for (const auto& v : vertices) {
    if (!v.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "mesh has non-finite vertices");
    }
  }
  const int n = static_cast<int>(vertices.size());
  for (const auto& tri : triangles) {
    for (int idx : tri) {
      if (idx < 0 || idx >= n) {
        throw Error(ErrorCode::kInvalidArgument,
                    "triangle index out of range");
      }
    }
  }
  if (!colors.empty() && colors.size() != vertices.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "per-vertex colors must match vertex count");
  }
}

Vec3 Mesh::bbox_min() const {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  for (const auto& v : vertices) lo = lo.cwiseMin(v);
  return vertices.empty() ? Vec3::Zero() : lo;
}

Vec3 Mesh::bbox_max() const {
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
  for (const auto& v : vertices) hi = hi.cwiseMax(v);
  return vertices.empty() ? Vec3::Zero() : hi;
}

double Mesh::max_dimension() const {
  constexpr std::size_t kMaxExact = 4096;
  const std::size_t stride =
      vertices.size() <= kMaxExact ? 1 : (vertices.size() + kMaxExact - 1) / kMaxExact;
  double best = 0.0;
  for (std::size_t i = 0; i < vertices.size(); i += stride) {
    for (std::size_t j = i + stride; j < vertices.size(); j += stride) {
      best = std::max(best, (vertices[i] - vertices[j]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

double Mesh::surface_area() const {
  double area = 0.0;
  for (const auto& t : triangles) {
    area += 0.5 * (vertices[t[1]] - vertices[t[0]])
                      .cross(vertices[t[2]] - vertices[t[0]])
                      .norm();
  }
  return area;
}

Mesh Mesh::transformed(const Pose& pose) const {
  Mesh out = *this;
  for (auto& v : out.vertices) v = pose.apply(v);
  return out;
}

Mesh make_box(double size_x, double size_y, double size_z) {
  const double hx = size_x / 2, hy = size_y / 2, hz = size_z / 2;
  Mesh m;
  m.vertices = {{-hx, -hy, -hz}, {hx, -hy, -hz}, {hx, hy, -hz}, {-hx, hy, -hz},
                {-hx, -hy, hz},  {hx, -hy, hz},  {hx, hy, hz},  {-hx, hy, hz}};
  m.triangles = {{0, 2, 1}, {0, 3, 2},   // -z
                 {4, 5, 6}, {4, 6, 7},   // +z
                 {0, 1, 5}, {0, 5, 4},   // -y
                 {3, 7, 6}, {3, 6, 2},   // +y
                 {0, 4, 7}, {0, 7, 3},   // -x
                 {1, 2, 6}, {1, 6, 5}};  // +x
  return m;
}

}  // namespace sixdof
