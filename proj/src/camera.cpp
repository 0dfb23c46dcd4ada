// SPDX-License-Identifier: MIT

#include "sixdof/camera.h"

#include <cmath>

#include "sixdof/error.h"

namespace sixdof {

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw Error(ErrorCode::kInvalidArgument,
                "principal point must lie inside the image");
  }
}

Intrinsics Intrinsics::scaled(double factor) const {
  return {fx * factor,
          fy * factor,
          cx * factor,
          cy * factor,
          static_cast<int>(std::lround(width * factor)),
          static_cast<int>(std::lround(height * factor))};
}

Projection project(const Vec3& point, const Intrinsics& k) {
  if (!(point.z() > 0.0)) {
    throw Error(ErrorCode::kBehindCamera, "point has non-positive depth");
  }
  return {{k.fx * point.x() / point.z() + k.cx,
           k.fy * point.y() / point.z() + k.cy},
          point.z()};
}

Vec3 back_project(const Vec2& pixel, double depth_mm, const Intrinsics& k) {
  return {(pixel.x() - k.cx) * depth_mm / k.fx,
          (pixel.y() - k.cy) * depth_mm / k.fy, depth_mm};
}

}  // namespace sixdof
