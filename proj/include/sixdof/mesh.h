// SPDX-License-Identifier: MIT

#ifndef SIXDOF_MESH_H_
#define SIXDOF_MESH_H_

#include <array>
#include <cstdint>
#include <vector>

#include "sixdof/pose.h"

namespace sixdof {

// Triangle mesh with vertices in the object frame (mm).
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  // Either empty or one RGB triple per vertex.
  std::vector<std::array<std::uint8_t, 3>> colors;

  // Throws Error(kEmptyMesh) without triangles, Error(kInvalidArgument) on
  // out-of-range indices or non-finite vertices.
  void validate() const;

  Vec3 bbox_min() const;
  Vec3 bbox_max() const;
  Vec3 bbox_center() const { return 0.5 * (bbox_min() + bbox_max()); }
  // Largest distance between two vertices (mm). Exact up to 4096 vertices,
  // evaluated on an evenly strided subset beyond that.
  double max_dimension() const;
  double surface_area() const;

  Mesh transformed(const Pose& pose) const;
};

// Axis-aligned box centered at the origin, outward-facing triangles.
Mesh make_box(double size_x, double size_y, double size_z);

}  // namespace sixdof

#endif  // SIXDOF_MESH_H_
