// SPDX-License-Identifier: MIT

#ifndef SIXDOF_CAMERA_H_
#define SIXDOF_CAMERA_H_

#include "sixdof/pose.h"

namespace sixdof {

// Pinhole intrinsics in pixels. Continuous image coordinates put the center of
// the top-left pixel at (0.5, 0.5); pixel (i, j) covers [i, i+1) x [j, j+1).
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws Error(kInvalidArgument) when the invariants do not hold.
  void validate() const;
  // All parameters multiplied by `factor` (width/height rounded).
  Intrinsics scaled(double factor) const;
  bool contains(const Vec2& pixel) const {
    return pixel.x() >= 0.0 && pixel.y() >= 0.0 && pixel.x() < width &&
           pixel.y() < height;
  }
};

struct Projection {
  Vec2 pixel;
  double depth_mm = 0.0;
};

// Throws Error(kBehindCamera) when point.z() <= 0.
Projection project(const Vec3& point, const Intrinsics& k);
Vec3 back_project(const Vec2& pixel, double depth_mm, const Intrinsics& k);

// Continuous coordinate of the center of pixel (column, row).
inline Vec2 pixel_center(int column, int row) {
  return {column + 0.5, row + 0.5};
}

}  // namespace sixdof

#endif  // SIXDOF_CAMERA_H_
