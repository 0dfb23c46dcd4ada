// SPDX-License-Identifier: MIT

#include "sixdof/render.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace sixdof {
namespace {

constexpr double kNearPlaneMm = 1.0;

struct ScreenVertex {
  double u;
  double v;
  double inv_z;
};

// Clips the triangle against z >= near; returns the number of output vertices
// (0, 3 or 4).
int clip_near(const std::array<Vec3, 3>& in, std::array<Vec3, 4>& out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& a = in[i];
    const Vec3& b = in[(i + 1) % 3];
    const bool a_in = a.z() >= kNearPlaneMm;
    const bool b_in = b.z() >= kNearPlaneMm;
    if (a_in) out[n++] = a;
    if (a_in != b_in) {
      const double s = (kNearPlaneMm - a.z()) / (b.z() - a.z());
      out[n++] = a + s * (b - a);
    }
  }
  return n;
}

void raster_triangle(const ScreenVertex& a, const ScreenVertex& b,
                     const ScreenVertex& c, Image<double>& zbuf) {
  const double area = (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u);
  if (!(std::abs(area) > 1e-12)) return;
  const double inv_area = 1.0 / area;

  const double min_u = std::min({a.u, b.u, c.u});
  const double max_u = std::max({a.u, b.u, c.u});
  const double min_v = std::min({a.v, b.v, c.v});
  const double max_v = std::max({a.v, b.v, c.v});
  const int x0 = std::max(0, static_cast<int>(std::ceil(min_u - 0.5)));
  const int x1 = std::min(zbuf.width() - 1, static_cast<int>(std::floor(max_u - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(min_v - 0.5)));
  const int y1 = std::min(zbuf.height() - 1, static_cast<int>(std::floor(max_v - 0.5)));
  constexpr double kEdgeEps = -1e-12;

  for (int y = y0; y <= y1; ++y) {
    const double pv = y + 0.5;
    for (int x = x0; x <= x1; ++x) {
      const double pu = x + 0.5;
      const double w0 = ((b.u - pu) * (c.v - pv) - (b.v - pv) * (c.u - pu)) * inv_area;
      const double w1 = ((c.u - pu) * (a.v - pv) - (c.v - pv) * (a.u - pu)) * inv_area;
      const double w2 = 1.0 - w0 - w1;
      if (w0 < kEdgeEps || w1 < kEdgeEps || w2 < kEdgeEps) continue;
      const double inv_z = w0 * a.inv_z + w1 * b.inv_z + w2 * c.inv_z;
      if (!(inv_z > 0.0)) continue;
      const double z = 1.0 / inv_z;
      double& slot = zbuf.at(x, y);
      if (z < slot) slot = z;
    }
  }
}

}  // namespace

DepthImage render_depth(const Mesh& mesh, const Pose& pose, const Intrinsics& k) {
  k.validate();
  constexpr double kFar = std::numeric_limits<double>::infinity();
  Image<double> zbuf(k.width, k.height, kFar);

  std::vector<Vec3> cam(mesh.vertices.size());
  for (std::size_t i = 0; i < cam.size(); ++i) cam[i] = pose.apply(mesh.vertices[i]);

  auto to_screen = [&k](const Vec3& p) {
    return ScreenVertex{k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy,
                        1.0 / p.z()};
  };

  std::array<Vec3, 4> poly;
  for (const auto& tri : mesh.triangles) {
    const std::array<Vec3, 3> in{cam[tri[0]], cam[tri[1]], cam[tri[2]]};
    const int n = clip_near(in, poly);
    if (n < 3) continue;
    const ScreenVertex s0 = to_screen(poly[0]);
    for (int i = 1; i + 1 < n; ++i) {
      raster_triangle(s0, to_screen(poly[i]), to_screen(poly[i + 1]), zbuf);
    }
  }

  DepthImage depth(k.width, k.height, 0.0f);
  for (std::size_t i = 0; i < zbuf.size(); ++i) {
    const double z = zbuf.data()[i];
    if (z != kFar) depth.data()[i] = static_cast<float>(z);
  }
  return depth;
}

Mask render_mask(const Mesh& mesh, const Pose& pose, const Intrinsics& k) {
  return mask_from_depth(render_depth(mesh, pose, k));
}

Mask mask_from_depth(const DepthImage& depth) {
  Mask mask(depth.width(), depth.height(), 0);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    mask.data()[i] = depth.data()[i] > 0.0f ? 1 : 0;
  }
  return mask;
}

std::size_t count_nonzero(const Mask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.data().begin(), mask.data().end(),
                    [](std::uint8_t v) { return v != 0; }));
}

std::size_t count_nonzero(const DepthImage& depth) {
  return static_cast<std::size_t>(
      std::count_if(depth.data().begin(), depth.data().end(),
                    [](float v) { return v > 0.0f; }));
}

}  // namespace sixdof
