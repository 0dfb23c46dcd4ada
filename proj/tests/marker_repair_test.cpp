// SPDX-License-Identifier: MIT

#include "sixdof/marker_repair.h"

#include <gtest/gtest.h>

#include <cmath>

#include "sixdof/error.h"
#include "scene_util.h"
#include "test_util.h"

namespace sixdof {
namespace {

using testing::MarkerScene;

const Intrinsics kK = testing::kinect_like();

// Union of all marker windows, built independently of the implementation.
Mask window_union(const MarkerScene& scene) {
  Mask m(kK.width, kK.height, 0);
  for (const Vec3& p : scene.markers.positions) {
    const Vec2 px = project(scene.pose.apply(p), kK).pixel;
    const int cx = static_cast<int>(std::floor(px.x()));
    const int cy = static_cast<int>(std::floor(px.y()));
    for (int y = cy - 5; y <= cy + 4; ++y) {
      for (int x = cx - 5; x <= cx + 4; ++x) {
        if (m.in_bounds(x, y)) m.at(x, y) = 1;
      }
    }
  }
  return m;
}

RepairOptions with_sigma(double sigma) {
  RepairOptions o;
  o.noise_sigma_mm = sigma;
  return o;
}

TEST(MarkerWindowTest, CenteredAndClipped) {
  const PixelWindow w = marker_window(Vec2(100.7, 50.2), 10, 640, 480);
  EXPECT_EQ(w.x0, 95);
  EXPECT_EQ(w.x1, 105);
  EXPECT_EQ(w.y0, 45);
  EXPECT_EQ(w.y1, 55);
  const PixelWindow c = marker_window(Vec2(1.5, 478.9), 10, 640, 480);
  EXPECT_EQ(c.x0, 0);
  EXPECT_EQ(c.x1, 6);
  EXPECT_EQ(c.y0, 473);
  EXPECT_EQ(c.y1, 480);
}

TEST(MarkerRepairTest, NoiselessRepairOfCleanFrameIsExact) {
  const MarkerScene scene(kK);
  const RepairResult r =
      repair_frame(scene.clean, scene.pose, scene.mesh, scene.markers, kK, with_sigma(0.0), 1);
  EXPECT_EQ(r.depth, scene.clean);
  EXPECT_EQ(r.report.markers_total, 5);
  EXPECT_EQ(r.report.markers_visible, 5);
  EXPECT_EQ(r.report.markers_patched, 5);
  EXPECT_EQ(r.report.pixels_patched, 500u);
  const double fraction = 500.0 / count_nonzero(scene.clean);
  EXPECT_DOUBLE_EQ(r.report.fraction_object_pixels_patched, fraction);
}

TEST(MarkerRepairTest, SpikeArtifactsAreRemoved) {
  const MarkerScene scene(kK);
  const DepthImage corrupted = testing::add_marker_spikes(scene.clean, scene, kK, 3.0, 120.0);
  const RepairResult r = repair_frame(corrupted, scene.pose, scene.mesh, scene.markers, kK,
                                      with_sigma(2.0), 7, &scene.clean);
  ASSERT_TRUE(r.report.rmse_before_mm && r.report.rmse_after_mm);
  EXPECT_GT(*r.report.rmse_before_mm / *r.report.rmse_after_mm, 10.0);
  EXPECT_NEAR(*r.report.rmse_after_mm, 2.0, 0.5);
  EXPECT_EQ(r.report.markers_patched, 5);
}

TEST(MarkerRepairTest, PixelsOutsideWindowsAreBitIdentical) {
  const MarkerScene scene(kK);
  const DepthImage corrupted = testing::add_marker_spikes(scene.clean, scene, kK, 3.0, 120.0);
  const RepairResult r = repair_frame(corrupted, scene.pose, scene.mesh, scene.markers, kK,
                                      with_sigma(2.0), 3);
  const Mask windows = window_union(scene);
  std::size_t changed = 0;
  for (int y = 0; y < kK.height; ++y) {
    for (int x = 0; x < kK.width; ++x) {
      if (windows.at(x, y)) {
        changed += r.depth.at(x, y) != corrupted.at(x, y);
      } else {
        ASSERT_EQ(r.depth.at(x, y), corrupted.at(x, y)) << x << "," << y;
      }
    }
  }
  EXPECT_EQ(changed, r.report.pixels_patched);
}

TEST(MarkerRepairTest, BackgroundInsideWindowIsUntouched) {
  const Intrinsics k = kK;
  MarkerScene scene(k);
  // A marker hanging just past the box edge puts background into its window.
  scene.markers.positions = {Vec3(-93, 0, -51.5)};
  DepthImage observed = scene.clean;
  for (auto& d : observed.data()) {
    if (d == 0.0f) d = 3000.0f;
  }
  const RepairResult r =
      repair_frame(observed, scene.pose, scene.mesh, scene.markers, k, with_sigma(0.0), 1);
  EXPECT_EQ(r.report.markers_patched, 1);
  EXPECT_GT(r.report.pixels_patched, 0u);
  EXPECT_LT(r.report.pixels_patched, 100u);
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (scene.clean.data()[i] == 0.0f) ASSERT_EQ(r.depth.data()[i], 3000.0f);
  }
}

// Places a flat occluder `offset_mm` in front of the surface over every marker window.
DepthImage occlude_windows(const MarkerScene& scene, double offset_mm) {
  DepthImage out = scene.clean;
  const Mask windows = window_union(scene);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (windows.data()[i] && out.data()[i] > 0.0f) {
      out.data()[i] = static_cast<float>(out.data()[i] - offset_mm);
    }
  }
  return out;
}

TEST(MarkerRepairTest, OccludedMarkersAreSkipped) {
  const MarkerScene scene(kK);
  const DepthImage occluded = occlude_windows(scene, 50.0);
  const RepairResult r =
      repair_frame(occluded, scene.pose, scene.mesh, scene.markers, kK, with_sigma(2.0), 5);
  EXPECT_EQ(r.report.markers_visible, 0);
  EXPECT_EQ(r.report.markers_patched, 0);
  EXPECT_EQ(r.report.pixels_patched, 0u);
  EXPECT_EQ(r.depth, occluded);
}

TEST(MarkerRepairTest, VisibilityFlipsAtTenMillimetres) {
  const MarkerScene scene(kK);
  // Marker centres sit 1.5 mm in front of the face, so the window median is
  // offset + ~1.5 mm away from the marker depth. The tilt spreads the window
  // depths by a few mm, so stay clear of the exact boundary.
  for (double offset : {0.0, 2.0, 5.0, 7.0}) {
    const auto r = repair_frame(occlude_windows(scene, -offset), scene.pose, scene.mesh,
                                scene.markers, kK, with_sigma(0.0), 1);
    EXPECT_EQ(r.report.markers_patched, 5) << offset;
  }
  for (double offset : {13.0, 15.0, 20.0, 50.0}) {
    const auto r = repair_frame(occlude_windows(scene, offset), scene.pose, scene.mesh,
                                scene.markers, kK, with_sigma(0.0), 1);
    EXPECT_EQ(r.report.markers_patched, 0) << offset;
  }
}

TEST(MarkerRepairTest, IdempotentWithoutNoise) {
  const MarkerScene scene(kK);
  const DepthImage corrupted = testing::add_marker_spikes(scene.clean, scene, kK, 3.0, 120.0);
  const auto once =
      repair_frame(corrupted, scene.pose, scene.mesh, scene.markers, kK, with_sigma(0.0), 1);
  const auto twice =
      repair_frame(once.depth, scene.pose, scene.mesh, scene.markers, kK, with_sigma(0.0), 2);
  EXPECT_EQ(once.depth, twice.depth);
}

TEST(MarkerRepairTest, DeterministicUnderSeed) {
  const MarkerScene scene(kK);
  const auto a = repair_frame(scene.clean, scene.pose, scene.mesh, scene.markers, kK,
                              with_sigma(2.0), 42);
  const auto b = repair_frame(scene.clean, scene.pose, scene.mesh, scene.markers, kK,
                              with_sigma(2.0), 42);
  const auto c = repair_frame(scene.clean, scene.pose, scene.mesh, scene.markers, kK,
                              with_sigma(2.0), 43);
  EXPECT_EQ(a.depth, b.depth);
  EXPECT_NE(a.depth, c.depth);
}

TEST(MarkerRepairTest, MarkersOutOfFrameCountAsNotVisible) {
  MarkerScene scene(kK);
  scene.markers.positions.push_back(Vec3(5000, 0, -51.5));
  scene.markers.positions.push_back(Vec3(0, 0, -5000));  // behind the camera
  const auto r = repair_frame(scene.clean, scene.pose, scene.mesh, scene.markers, kK,
                              with_sigma(0.0), 1);
  EXPECT_EQ(r.report.markers_total, 7);
  EXPECT_EQ(r.report.markers_visible, 5);
}

TEST(MarkerRepairTest, WrongPoseIsPoseMeshMismatch) {
  const MarkerScene scene(kK);
  const Pose wrong(scene.pose.rotation(), scene.pose.translation() + Vec3(400, 0, 0));
  try {
    repair_frame(scene.clean, wrong, scene.mesh, scene.markers, kK, with_sigma(0.0), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPoseMeshMismatch);
  }
  // Nothing rendered means nothing to check against.
  const Pose behind(Rotation(), Vec3(0, 0, -1000));
  const auto r =
      repair_frame(scene.clean, behind, scene.mesh, scene.markers, kK, with_sigma(0.0), 1);
  EXPECT_EQ(r.depth, scene.clean);
}

TEST(MarkerRepairTest, SequenceRepairIndependentOfJobs) {
  const MarkerScene scene(kK);
  Sequence seq;
  seq.intrinsics = kK;
  for (int i = 0; i < 4; ++i) {
    seq.frames.push_back({testing::add_marker_spikes(scene.clean, scene, kK, 3.0, 120.0),
                          std::nullopt, 33.0 * i, scene.pose});
  }
  Sequence a = seq, b = seq;
  const auto ra = repair_sequence(a, scene.mesh, scene.markers, with_sigma(2.0), 9, 1);
  const auto rb = repair_sequence(b, scene.mesh, scene.markers, with_sigma(2.0), 9, 3);
  ASSERT_EQ(ra.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(a.frames[i].depth, b.frames[i].depth);
  EXPECT_NE(a.frames[0].depth, a.frames[1].depth);
}

}  // namespace
}  // namespace sixdof
