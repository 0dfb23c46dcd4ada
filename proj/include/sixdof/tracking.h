// SPDX-License-Identifier: MIT

#ifndef SIXDOF_TRACKING_H_
#define SIXDOF_TRACKING_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sixdof/camera.h"
#include "sixdof/image.h"
#include "sixdof/kdtree.h"
#include "sixdof/mesh.h"

namespace sixdof {

// What a tracker sees of a frame. Ground truth is deliberately absent.
struct FrameView {
  const DepthImage& depth;
  const RgbImage* rgb = nullptr;
  double timestamp_ms = 0.0;
  const Intrinsics& intrinsics;
  std::size_t index = 0;
};

struct TrackResult {
  Pose pose;
  // Set when too little of the observation matched the model; the pose is
  // then the previous one.
  bool low_overlap = false;
  int iterations = 0;
  double inlier_fraction = 1.0;
  std::vector<double> residual_history;
};

inline TrackResult track_result(const Pose& pose) {
  TrackResult r;
  r.pose = pose;
  return r;
}

class Tracker {
 public:
  virtual ~Tracker() = default;
  virtual std::string name() const = 0;
  // Throws Error(kEmptyMesh) for meshes without triangles.
  virtual void init(const Mesh& mesh, const Pose& pose0) = 0;
  virtual TrackResult update(const FrameView& frame) = 0;
  virtual void reset(const Pose& pose) = 0;
  virtual const Pose& pose() const = 0;
};

struct IcpOptions {
  int model_samples = 5000;
  int max_observed_points = 4000;
  int max_iterations = 30;
  double relative_tolerance = 1e-4;
  double max_distance_mm = 20.0;
  double max_normal_angle_deg = 60.0;
  // Observed points are kept inside a sphere of crop_scale * max dimension
  // (diameter) around the predicted object centre.
  double crop_scale = 1.3;
  double min_inlier_fraction = 0.1;
  int min_inliers = 30;
  int normal_step_px = 2;
  // Depth jump above which a neighbour is not used for the normal estimate.
  double normal_max_jump_mm = 15.0;
  std::uint64_t seed = 0;
};

struct SurfaceSample {
  Vec3 point;
  Vec3 normal;
};

// Area-uniform surface samples with face normals; deterministic per seed.
std::vector<SurfaceSample> sample_surface(const Mesh& mesh, int count, std::uint64_t seed);

// Point-to-plane ICP against the model surface.
class IcpTracker : public Tracker {
 public:
  explicit IcpTracker(IcpOptions options = {});
  std::string name() const override { return "icp"; }
  void init(const Mesh& mesh, const Pose& pose0) override;
  TrackResult update(const FrameView& frame) override;
  void reset(const Pose& pose) override { pose_ = pose; }
  const Pose& pose() const override { return pose_; }

 private:
  struct Observed {
    Vec3 point;   // camera frame
    Vec3 normal;  // camera frame, facing the camera
  };
  std::vector<Observed> gather(const FrameView& frame) const;

  IcpOptions options_;
  Pose pose_;
  std::vector<SurfaceSample> model_;
  KdTree index_;
  Vec3 center_ = Vec3::Zero();
  double diameter_ = 0.0;
};

// Replays the ground-truth list it was constructed with. Harness validation only.
class EchoTracker : public Tracker {
 public:
  explicit EchoTracker(std::vector<Pose> ground_truth) : truth_(std::move(ground_truth)) {}
  std::string name() const override { return "echo"; }
  void init(const Mesh& mesh, const Pose& pose0) override;
  TrackResult update(const FrameView& frame) override;
  void reset(const Pose& pose) override { pose_ = pose; }
  const Pose& pose() const override { return pose_; }

 private:
  std::vector<Pose> truth_;
  Pose pose_;
};

// Never moves from the last init or reset pose.
class FrozenTracker : public Tracker {
 public:
  std::string name() const override { return "frozen"; }
  void init(const Mesh& mesh, const Pose& pose0) override;
  TrackResult update(const FrameView&) override { return track_result(pose_); }
  void reset(const Pose& pose) override { pose_ = pose; }
  const Pose& pose() const override { return pose_; }

 private:
  Pose pose_;
};

// Returns a scripted pose per frame index, ignoring resets.
class PlaybackTracker : public Tracker {
 public:
  explicit PlaybackTracker(std::vector<Pose> script) : script_(std::move(script)) {}
  std::string name() const override { return "playback"; }
  void init(const Mesh& mesh, const Pose& pose0) override;
  TrackResult update(const FrameView& frame) override;
  void reset(const Pose& pose) override { pose_ = pose; }
  const Pose& pose() const override { return pose_; }

 private:
  std::vector<Pose> script_;
  Pose pose_;
};

}  // namespace sixdof

#endif  // SIXDOF_TRACKING_H_
