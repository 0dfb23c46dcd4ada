// SPDX-License-Identifier: MIT

#ifndef SIXDOF_CALIBRATION_H_
#define SIXDOF_CALIBRATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sixdof/camera.h"
#include "sixdof/image.h"
#include "sixdof/pose.h"

namespace sixdof {

// Links of the mocap/camera rig. Frames: obj (mesh), objm (object markers),
// vcn (mocap world), kntm (camera markers), knt (camera RGB optical frame).
struct RigTransforms {
  Pose objm_to_vcn;
  Pose kntm_to_vcn;
  Pose kntm_to_knt;
  Pose obj_to_objm;
};

// Object pose in the camera frame:
//   obj_to_knt = kntm_to_knt * inverse(kntm_to_vcn) * objm_to_vcn * obj_to_objm
Pose chain_object_pose(const RigTransforms& rig);

// Origin convention for a marker-defined frame: the markers' center of mass.
Vec3 marker_centroid(std::span<const Vec3> markers);

struct SphereFit {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double rms_residual = 0.0;
};

// Least-squares sphere through probe-tip positions: algebraic solve, then
// Gauss-Newton on the geometric distances. Throws Error(kDegenerateInput) for
// fewer than 4 points or (near-)coplanar input.
SphereFit fit_sphere(std::span<const Vec3> points);

struct Correspondence2D3D {
  Vec2 image_point;  // px
  Vec3 world_point;  // mm
};

struct PnpOptions {
  int max_iterations = 100;
  double initial_lambda = 1e-3;
  // A run that hits max_iterations with RMS reprojection above this fails.
  double max_rms_px = 1.0;
};

struct PnpResult {
  Pose world_to_camera;
  double mean_reprojection_px = 0.0;
  double rms_reprojection_px = 0.0;
  int iterations = 0;
  // Mean squared reprojection error after DLT and after every accepted LM step.
  std::vector<double> cost_history;
};

// DLT initialization followed by Levenberg-Marquardt on the mean squared
// pixel reprojection error. Throws Error(kInsufficientPoints) below 6
// correspondences, Error(kDegenerateInput) for coplanar world points and
// Error(kNoConvergence) when LM stalls above PnpOptions::max_rms_px.
PnpResult solve_pnp(std::span<const Correspondence2D3D> correspondences,
                    const Intrinsics& k, const PnpOptions& options = {});

double reprojection_rms(std::span<const Correspondence2D3D> correspondences,
                        const Intrinsics& k, const Pose& world_to_camera);

struct TimedPoint3 {
  double time_ms = 0.0;
  Vec3 position;  // mm, mocap world frame
};

struct TimedDetection {
  double time_ms = 0.0;
  Vec2 pixel;
  // Index of the mocap track this detection observes.
  std::size_t track = 0;
};

using MocapTrack = std::vector<TimedPoint3>;

struct SyncOptions {
  double window_ms = 500.0;
  double step_ms = 1.0;
  // At least this many detections must map into the track at a candidate.
  std::size_t min_detections = 3;
  // Relative spread of the objective below which it is declared flat.
  double flat_tolerance = 1e-3;
};

struct SyncResult {
  double delta_t_ms = 0.0;
  double residual_px = 0.0;
  // Objective evaluated on the search grid (RMS px; NaN where not evaluable).
  std::vector<double> grid_offsets_ms;
  std::vector<double> grid_residuals_px;
};

// Piecewise-linear interpolation of a time-sorted track; nullopt outside it.
std::optional<Vec3> interpolate_track(const MocapTrack& track, double time_ms);

// RMS reprojection error of the detections when mocap positions are sampled at
// detection time + offset; nullopt when fewer than min_detections overlap.
std::optional<double> sync_residual(std::span<const MocapTrack> tracks,
                                    std::span<const TimedDetection> detections,
                                    const Intrinsics& k,
                                    const Pose& mocap_to_camera, double offset_ms,
                                    std::size_t min_detections = 1);

// Constant clock offset between mocap and camera timestamps: grid search over
// [-window, +window] then parabolic refinement of the best grid cell. Throws
// Error(kNoOverlap) when no candidate offset overlaps the track and
// Error(kFlatObjective) when the objective cannot localize the offset.
SyncResult estimate_time_offset(std::span<const MocapTrack> tracks,
                                std::span<const TimedDetection> detections,
                                const Intrinsics& k, const Pose& mocap_to_camera,
                                const SyncOptions& options = {});

// Optional per-pixel affine depth pre-correction, d' = scale * d + offset.
// Disabled by default; the per-pixel maps, when non-empty, override the
// global coefficients and must match the image size.
struct DepthCorrection {
  bool enabled = false;
  double scale = 1.0;
  double offset_mm = 0.0;
  std::vector<float> scale_map;
  std::vector<float> offset_map;
};

void apply_depth_correction(DepthImage& depth, const DepthCorrection& correction);

}  // namespace sixdof

#endif  // SIXDOF_CALIBRATION_H_
