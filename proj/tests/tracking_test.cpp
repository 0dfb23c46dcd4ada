// SPDX-License-Identifier: MIT

#include "sixdof/tracking.h"

#include <gtest/gtest.h>

#include <random>

#include "sixdof/error.h"
#include "sixdof/render.h"
#include "test_util.h"

namespace sixdof {
namespace {

const Intrinsics kK = testing::kinect_like();

// Box turned so that three faces face the camera.
struct IcpScene {
  Mesh mesh = make_box(120, 80, 60);
  Pose pose{Rotation::about_x(-25.0) * Rotation::about_y(35.0), Vec3(20, -15, 800)};
};

FrameView view(const DepthImage& depth, std::size_t index = 0) {
  return FrameView{depth, nullptr, 33.0 * index, kK, index};
}

void expect_pose_near(const Pose& a, const Pose& b, double mm, double deg) {
  const PoseError e = pose_error(a, b);
  EXPECT_LT(e.translation_mm, mm);
  EXPECT_LT(e.rotation_deg, deg);
}

TEST(KdTreeTest, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  std::vector<Vec3> pts;
  for (int i = 0; i < 3000; ++i) pts.push_back(testing::random_vec(rng, 100.0));
  const KdTree tree(pts);
  for (int q = 0; q < 1000; ++q) {
    const Vec3 query = testing::random_vec(rng, 120.0);
    int best = -1;
    double best_d = 1e300;
    for (int i = 0; i < 3000; ++i) {
      const double d = (pts[i] - query).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    const KdTree::Hit hit = tree.nearest(query);
    ASSERT_EQ(hit.index, best);
    ASSERT_EQ(hit.distance_sq, best_d);
    const KdTree::Hit bounded = tree.nearest(query, 10.0);
    if (best_d < 100.0) {
      ASSERT_EQ(bounded.index, best);
    } else {
      ASSERT_EQ(bounded.index, -1);
    }
  }
  EXPECT_EQ(KdTree().nearest(Vec3::Zero()).index, -1);
}

TEST(SurfaceSampleTest, AreaUniformOnBoxFaces) {
  const Mesh box = make_box(100, 50, 20);
  const auto samples = sample_surface(box, 20000, 1);
  ASSERT_EQ(samples.size(), 20000u);
  // Faces by outward normal axis; areas 50*20, 100*20, 100*50 (x2 each).
  double counts[3] = {0, 0, 0};
  for (const auto& s : samples) {
    int axis;
    s.normal.cwiseAbs().maxCoeff(&axis);
    EXPECT_NEAR(std::abs(s.point[axis]), box.bbox_max()[axis], 1e-9);
    EXPECT_NEAR(s.normal.norm(), 1.0, 1e-12);
    EXPECT_GT(s.normal.dot(s.point), 0.0);
    counts[axis] += 1;
  }
  const double total = 2 * (50 * 20 + 100 * 20 + 100 * 50);
  EXPECT_NEAR(counts[0] / 20000, 2 * 1000 / total, 0.01);
  EXPECT_NEAR(counts[1] / 20000, 2 * 2000 / total, 0.01);
  EXPECT_NEAR(counts[2] / 20000, 2 * 5000 / total, 0.01);
  const auto again = sample_surface(box, 20000, 1);
  EXPECT_EQ(again[1234].point, samples[1234].point);
}

TEST(IcpTrackerTest, InitAndEmptyMesh) {
  IcpTracker t;
  t.init(make_box(10, 10, 10), Pose());
  EXPECT_EQ(t.pose().matrix(), Mat4::Identity());
  try {
    t.init(Mesh{}, Pose());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyMesh);
  }
}

TEST(IcpTrackerTest, FixedPointOnMatchingFrame) {
  const IcpScene s;
  const DepthImage depth = render_depth(s.mesh, s.pose, kK);
  IcpTracker t;
  t.init(s.mesh, s.pose);
  for (int i = 0; i < 3; ++i) {
    const TrackResult r = t.update(view(depth, i));
    EXPECT_FALSE(r.low_overlap);
    expect_pose_near(r.pose, s.pose, 0.1, 0.05);
  }
}

TEST(IcpTrackerTest, RecoversSmallOffset) {
  const IcpScene s;
  const Pose moved = s.pose * Pose::from_translation(5, 0, 0);
  const DepthImage depth = render_depth(s.mesh, moved, kK);
  IcpTracker t;
  t.init(s.mesh, s.pose);
  const TrackResult r = t.update(view(depth));
  EXPECT_FALSE(r.low_overlap);
  expect_pose_near(r.pose, moved, 0.5, 0.2);
  EXPECT_GT(r.iterations, 0);
}

TEST(IcpTrackerTest, RecoversSmallRotation) {
  const IcpScene s;
  const Pose moved = s.pose * Pose(Rotation::about_z(3.0), Vec3(2, -3, 4));
  const DepthImage depth = render_depth(s.mesh, moved, kK);
  IcpTracker t;
  t.init(s.mesh, s.pose);
  expect_pose_near(t.update(view(depth)).pose, moved, 0.5, 0.2);
}

TEST(IcpTrackerTest, ResidualNonIncreasing) {
  const IcpScene s;
  std::mt19937_64 rng(5);
  std::normal_distribution<float> noise(0.0f, 2.0f);
  DepthImage depth = render_depth(s.mesh, s.pose * Pose(Rotation::about_x(2), Vec3(4, 3, -2)), kK);
  for (auto& d : depth.data()) {
    if (d > 0.0f) d += noise(rng);
  }
  IcpTracker t;
  t.init(s.mesh, s.pose);
  const TrackResult r = t.update(view(depth));
  ASSERT_GE(r.residual_history.size(), 2u);
  for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
    EXPECT_LE(r.residual_history[i], r.residual_history[i - 1]);
  }
}

TEST(IcpTrackerTest, FarAwayFrameIsLowOverlap) {
  const IcpScene s;
  const Pose away(s.pose.rotation(), s.pose.translation() + Vec3(200, 0, 0));
  const DepthImage depth = render_depth(s.mesh, away, kK);
  IcpTracker t;
  t.init(s.mesh, s.pose);
  const TrackResult r = t.update(view(depth));
  EXPECT_TRUE(r.low_overlap);
  EXPECT_EQ(r.pose.matrix(), s.pose.matrix());
  EXPECT_EQ(t.pose().matrix(), s.pose.matrix());
  EXPECT_TRUE(t.update(view(DepthImage(kK.width, kK.height))).low_overlap);
}

TEST(IcpTrackerTest, DeterministicPoseStream) {
  const IcpScene s;
  std::vector<DepthImage> frames;
  for (int i = 0; i < 4; ++i) {
    frames.push_back(render_depth(s.mesh, s.pose * Pose(Rotation::about_y(i), Vec3(i, 0, 0)), kK));
  }
  IcpTracker a, b;
  a.init(s.mesh, s.pose);
  b.init(s.mesh, s.pose);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(a.update(view(frames[i], i)).pose.matrix(), b.update(view(frames[i], i)).pose.matrix());
  }
}

TEST(IcpTrackerTest, ResetThenUpdateKeepsPose) {
  const IcpScene s;
  const DepthImage depth = render_depth(s.mesh, s.pose, kK);
  IcpTracker t;
  t.init(s.mesh, Pose::from_translation(0, 0, 500));
  t.reset(s.pose);
  EXPECT_EQ(t.pose().matrix(), s.pose.matrix());
  expect_pose_near(t.update(view(depth)).pose, s.pose, 0.1, 0.05);
  t.reset(Pose());
  EXPECT_EQ(t.pose().matrix(), Mat4::Identity());
}

TEST(ReferenceTrackerTest, EchoFrozenPlayback) {
  const Mesh box = make_box(10, 10, 10);
  const DepthImage depth(kK.width, kK.height);
  const std::vector<Pose> gt = {Pose::from_translation(0, 0, 100), Pose::from_translation(1, 0, 100)};

  EchoTracker echo(gt);
  echo.init(box, gt[0]);
  EXPECT_EQ(echo.update(view(depth, 1)).pose.matrix(), gt[1].matrix());
  EXPECT_THROW(echo.update(view(depth, 2)), Error);

  FrozenTracker frozen;
  frozen.init(box, gt[0]);
  EXPECT_EQ(frozen.update(view(depth, 1)).pose.matrix(), gt[0].matrix());
  frozen.reset(gt[1]);
  EXPECT_EQ(frozen.update(view(depth, 1)).pose.matrix(), gt[1].matrix());

  PlaybackTracker play({gt[1], gt[0]});
  play.init(box, gt[0]);
  EXPECT_EQ(play.update(view(depth, 0)).pose.matrix(), gt[1].matrix());
  EXPECT_EQ(frozen.name(), "frozen");
  EXPECT_EQ(echo.name(), "echo");
}

}  // namespace
}  // namespace sixdof
