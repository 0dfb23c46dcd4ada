// SPDX-License-Identifier: MIT

#include "sixdof/render.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sixdof/error.h"
#include "test_util.h"

namespace sixdof {
namespace {

const Intrinsics kK{500.0, 500.0, 320.0, 240.0, 640, 480};

// Quad with corners (x0,y0)-(x1,y1) at constant depth z.
Mesh quad(double x0, double y0, double x1, double y1, double z) {
  Mesh m;
  m.vertices = {{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

TEST(ProjectTest, Examples) {
  const Projection a = project(Vec3(0, 0, 1000), kK);
  EXPECT_EQ(a.pixel, Vec2(320, 240));
  EXPECT_EQ(a.depth_mm, 1000.0);
  const Projection b = project(Vec3(100, 0, 1000), kK);
  EXPECT_DOUBLE_EQ(b.pixel.x(), 370.0);
  EXPECT_DOUBLE_EQ(b.pixel.y(), 240.0);
  try {
    project(Vec3(1, 1, 0), kK);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBehindCamera);
  }
  EXPECT_THROW(project(Vec3(1, 1, -5), kK), Error);
}

TEST(ProjectTest, BackProjectRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> xy(-500, 500), z(100, 3000);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(xy(rng), xy(rng), z(rng));
    const Projection pr = project(p, kK);
    EXPECT_LE((back_project(pr.pixel, pr.depth_mm, kK) - p).norm(), 1e-9);
  }
}

TEST(IntrinsicsTest, Validation) {
  EXPECT_NO_THROW(kK.validate());
  EXPECT_THROW((Intrinsics{0, 500, 320, 240, 640, 480}.validate()), Error);
  EXPECT_THROW((Intrinsics{500, 500, 640, 240, 640, 480}.validate()), Error);
  EXPECT_THROW((Intrinsics{500, 500, 320, 240, 0, 480}.validate()), Error);
}

TEST(RenderTest, PixelCenterConvention) {
  // u in [320, 321) contains only the center of column 320 (at 320.5).
  const DepthImage one = render_depth(quad(0.0, 0.0, 2.0, 2.0, 1000), Pose(), kK);
  EXPECT_EQ(count_nonzero(one), 1u);
  EXPECT_GT(one.at(320, 240), 0.0f);
  // u in [319.55, 320.45] straddles the boundary without covering a center.
  const DepthImage none = render_depth(quad(-0.9, -0.9, 0.9, 0.9, 1000), Pose(), kK);
  EXPECT_EQ(count_nonzero(none), 0u);
}

TEST(RenderTest, FrontoParallelSquare) {
  const DepthImage d = render_depth(quad(-100, -100, 100, 100, 1000), Pose(), kK);
  // Projects to [270, 370) x [190, 290).
  for (int y = 195; y < 285; ++y) {
    for (int x = 275; x < 365; ++x) EXPECT_NEAR(d.at(x, y), 1000.0, 0.5);
  }
  EXPECT_EQ(d.at(10, 10), 0.0f);
  EXPECT_EQ(count_nonzero(d), 100u * 100u);
}

TEST(RenderTest, BehindCameraIsEmpty) {
  const DepthImage d = render_depth(quad(-100, -100, 100, 100, -1000), Pose(), kK);
  EXPECT_EQ(count_nonzero(d), 0u);
  const Mask m = render_mask(make_box(100, 100, 100), Pose::from_translation(0, 0, -500), kK);
  EXPECT_EQ(count_nonzero(m), 0u);
}

TEST(RenderTest, TiltedPlaneMatchesRayIntersection) {
  const Rotation tilt = Rotation::about_x(35.0) * Rotation::about_y(-20.0);
  const Pose pose(tilt, Vec3(20, -10, 1000));
  const DepthImage d = render_depth(quad(-200, -200, 200, 200, 0), pose, kK);
  const Vec3 n = tilt * Vec3::UnitZ();
  const double c = n.dot(pose.translation());
  std::size_t checked = 0;
  for (int y = 0; y < kK.height; ++y) {
    for (int x = 0; x < kK.width; ++x) {
      if (d.at(x, y) == 0.0f) continue;
      const Vec2 px = pixel_center(x, y);
      const Vec3 ray((px.x() - kK.cx) / kK.fx, (px.y() - kK.cy) / kK.fy, 1.0);
      EXPECT_NEAR(d.at(x, y), c / n.dot(ray), 1.0);
      ++checked;
    }
  }
  EXPECT_GT(checked, 10000u);
}

TEST(RenderTest, MaskMatchesDepthPredicate) {
  const Mesh box = make_box(120, 80, 60);
  const Pose pose(Rotation::about_y(30) * Rotation::about_x(20), Vec3(0, 0, 800));
  const DepthImage d = render_depth(box, pose, kK);
  const Mask m = render_mask(box, pose, kK);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(m.data()[i] != 0, d.data()[i] > 0.0f);
  }
  EXPECT_EQ(count_nonzero(m), count_nonzero(d));
  EXPECT_GT(count_nonzero(m), 0u);
}

TEST(RenderTest, OverlappingTrianglesTakeNearestDepth) {
  Mesh a = quad(-100, -100, 60, 60, 1000);
  Mesh b = quad(-60, -60, 100, 100, 900);
  // Tilt b so the two surfaces cross.
  for (auto& v : b.vertices) v.z() += 0.8 * v.x();
  Mesh both = a;
  const int off = static_cast<int>(both.vertices.size());
  for (const auto& v : b.vertices) both.vertices.push_back(v);
  for (const auto& t : b.triangles) both.triangles.push_back({t[0] + off, t[1] + off, t[2] + off});

  const DepthImage da = render_depth(a, Pose(), kK);
  const DepthImage db = render_depth(b, Pose(), kK);
  const DepthImage dab = render_depth(both, Pose(), kK);
  for (std::size_t i = 0; i < dab.size(); ++i) {
    const float va = da.data()[i], vb = db.data()[i];
    const float expected = va == 0.0f ? vb : (vb == 0.0f ? va : std::min(va, vb));
    EXPECT_EQ(dab.data()[i], expected);
  }
}

TEST(RenderTest, RigidInvarianceIsExact) {
  std::mt19937_64 rng(3);
  const Mesh box = make_box(150, 90, 70);
  for (int i = 0; i < 5; ++i) {
    const Pose pose(testing::random_rotation(rng), Vec3(0, 0, 900) + testing::random_vec(rng, 80));
    EXPECT_EQ(render_depth(box, pose, kK), render_depth(box.transformed(pose), Pose(), kK));
  }
}

TEST(RenderTest, ResolutionConsistency) {
  const Mesh box = make_box(120, 100, 80);
  const Pose pose(Rotation::about_y(25) * Rotation::about_x(-15), Vec3(30, 10, 1000));
  const double a1 = static_cast<double>(count_nonzero(render_mask(box, pose, kK)));
  const double a2 = static_cast<double>(count_nonzero(render_mask(box, pose, kK.scaled(2.0))));
  EXPECT_NEAR(a2 / a1, 4.0, 0.2);
}

TEST(RenderTest, NearPlaneClipping) {
  // Quad spanning from behind to in front of the camera renders only its front part.
  Mesh m;
  m.vertices = {{-50, 50, -100}, {50, 50, -100}, {50, 50, 1000}, {-50, 50, 1000}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  const DepthImage d = render_depth(m, Pose(), kK);
  EXPECT_GT(count_nonzero(d), 0u);
  for (float v : d.data()) {
    if (v > 0.0f) EXPECT_GE(v, 1.0f);
  }
}

}  // namespace
}  // namespace sixdof
