// SPDX-License-Identifier: MIT

#include "sixdof/synth_gen.h"

#include <gtest/gtest.h>

#include "sixdof/error.h"
#include "sixdof/render.h"
#include "test_util.h"

namespace sixdof {
namespace {

const Intrinsics kK = testing::kinect_like();
const Mesh kBox = make_box(120, 80, 60);

TrajectorySpec turntable(int length, double deg) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::kTurntable;
  s.length = length;
  s.deg_per_frame = deg;
  s.camera_distance_mm = 1200.0;
  return s;
}

TEST(TrajectoryTest, StaticWithoutNoiseIsConstant) {
  TrajectorySpec s;
  s.length = 6;
  const Sequence seq = generate_sequence(kBox, s, std::nullopt, 0.0, kK, 1);
  ASSERT_EQ(seq.frames.size(), 6u);
  for (const auto& f : seq.frames) {
    EXPECT_EQ(f.depth, seq.frames[0].depth);
    EXPECT_EQ(f.gt_pose.matrix(), seq.frames[0].gt_pose.matrix());
  }
  EXPECT_GT(count_nonzero(seq.frames[0].depth), 1000u);
  EXPECT_EQ(seq.scenario, ScenarioKind(StabilityScenario{StabilityVariant::kNear}));
  EXPECT_NO_THROW(seq.validate());
}

TEST(TrajectoryTest, TurntableStepsAreExact) {
  const auto poses = generate_trajectory(kBox, turntable(180, 2.0));
  ASSERT_EQ(poses.size(), 180u);
  for (std::size_t i = 1; i < poses.size(); ++i) {
    EXPECT_NEAR(delta_r(poses[i - 1].rotation(), poses[i].rotation()), 2.0, 1e-9);
    EXPECT_NEAR(delta_t(poses[i - 1].translation(), poses[i].translation()), 0.0, 1e-9);
  }
}

TEST(TrajectoryTest, SmoothRandomStepsMatchSpeeds) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::kSmoothRandom;
  s.length = 300;
  s.speed_t_mm_per_frame = 15.0;
  s.speed_r_deg_per_frame = 6.0;
  s.seed = 12;
  const auto poses = generate_trajectory(kBox, s);
  double max_offset = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    EXPECT_NEAR(delta_t(poses[i - 1].translation(), poses[i].translation()), 15.0, 1e-9);
    EXPECT_NEAR(delta_r(poses[i - 1].rotation(), poses[i].rotation()), 6.0, 1e-9);
    max_offset = std::max(max_offset, (poses[i].translation() - poses[0].translation()).norm());
  }
  // The pull towards the start keeps the object in front of the camera.
  EXPECT_LT(max_offset, 600.0);
  const auto again = generate_trajectory(kBox, s);
  EXPECT_EQ(again.back().matrix(), poses.back().matrix());
  s.seed = 13;
  EXPECT_NE(generate_trajectory(kBox, s).back().matrix(), poses.back().matrix());
}

TEST(TrajectoryTest, InvalidSpecsRejected) {
  TrajectorySpec s;
  s.length = 1;
  EXPECT_THROW(generate_trajectory(kBox, s), Error);
  s.length = 5;
  s.speed_t_mm_per_frame = -1.0;
  EXPECT_THROW(generate_trajectory(kBox, s), Error);
  EXPECT_THROW((OccluderSpec{0.2}.validate()), Error);
  EXPECT_NO_THROW((OccluderSpec{0.45}.validate()));
}

TEST(OccluderTest, ThirtyPercentLeavesSeventyPercentVisible) {
  for (auto orientation : {OccluderOrientation::kHorizontal, OccluderOrientation::kVertical}) {
    GenerationLog log;
    const Sequence seq = generate_sequence(kBox, turntable(10, 5.0), OccluderSpec{0.30, orientation},
                                           0.0, kK, 3, &log);
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      const DepthImage clean = render_depth(kBox, seq.frames[i].gt_pose, kK);
      std::size_t visible = 0;
      for (std::size_t p = 0; p < clean.size(); ++p) {
        visible += clean.data()[p] > 0.0f && seq.frames[i].depth.data()[p] == clean.data()[p];
      }
      const double ratio = static_cast<double>(visible) / count_nonzero(clean);
      EXPECT_NEAR(ratio, 0.70, 0.05);
      EXPECT_NEAR(log.occlusion[i].pixel_fraction, 1.0 - ratio, 1e-12);
      EXPECT_GT(log.occlusion[i].extent_fraction, 0.0);
      EXPECT_LT(log.occlusion[i].extent_fraction, 1.0);
    }
    EXPECT_EQ(seq.scenario, ScenarioKind(OcclusionScenario{30, orientation}));
  }
}

TEST(OccluderTest, HorizontalPanelRisesFromTheBottom) {
  const Sequence seq = generate_sequence(kBox, turntable(2, 1.0), OccluderSpec{0.45}, 0.0, kK, 3);
  const DepthImage& d = seq.frames[0].depth;
  // Bottom row fully covered by the panel, top row untouched background.
  for (int x = 0; x < d.width(); ++x) {
    EXPECT_GT(d.at(x, d.height() - 1), 0.0f);
    EXPECT_EQ(d.at(x, 0), 0.0f);
  }
}

TEST(MeasureOcclusionTest, UnoccludedAndFullyOccluded) {
  const Sequence seq = generate_sequence(kBox, turntable(3, 1.0), std::nullopt, 2.0, kK, 4);
  for (const auto& f : seq.frames) {
    EXPECT_NEAR(measure_occlusion(f.depth, kBox, f.gt_pose, kK), 0.0, 0.02);
  }
  DepthImage wall(kK.width, kK.height, 300.0f);
  EXPECT_EQ(measure_occlusion(wall, kBox, seq.frames[0].gt_pose, kK), 1.0);
  EXPECT_EQ(measure_occlusion(DepthImage(kK.width, kK.height), kBox, seq.frames[0].gt_pose, kK), 1.0);
}

TEST(MeasureOcclusionTest, GeneratedFractionsMeasureBack) {
  for (double fraction : {0.15, 0.45, 0.75}) {
    const Sequence seq = generate_sequence(kBox, turntable(12, 3.0), OccluderSpec{fraction}, 2.0,
                                           kK, 5);
    for (const auto& f : seq.frames) {
      EXPECT_NEAR(measure_occlusion(f.depth, kBox, f.gt_pose, kK), fraction, 0.07);
    }
  }
}

TEST(GenerateSequenceTest, DeterministicAndIndependentOfJobs) {
  const auto a = generate_sequence(kBox, turntable(5, 1.0), OccluderSpec{0.15}, 2.0, kK, 9, nullptr, 1);
  const auto b = generate_sequence(kBox, turntable(5, 1.0), OccluderSpec{0.15}, 2.0, kK, 9, nullptr, 3);
  const auto c = generate_sequence(kBox, turntable(5, 1.0), OccluderSpec{0.15}, 2.0, kK, 10, nullptr, 1);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(a.frames[i].depth, b.frames[i].depth);
    EXPECT_NE(a.frames[i].depth, c.frames[i].depth);
  }
  EXPECT_NEAR(a.frames[1].timestamp_ms - a.frames[0].timestamp_ms, 1000.0 / 30.0, 1e-12);
}

TEST(TrajectoryJsonTest, RoundTrip) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::kSmoothRandom;
  s.speed_t_mm_per_frame = 7.5;
  s.seed = 99;
  const TrajectorySpec back = trajectory_from_json(trajectory_to_json(s));
  EXPECT_EQ(trajectory_to_json(back), trajectory_to_json(s));
  EXPECT_THROW(parse_trajectory_kind("spiral"), Error);
}

}  // namespace
}  // namespace sixdof
