// SPDX-License-Identifier: MIT

#ifndef SIXDOF_SYNTH_GEN_H_
#define SIXDOF_SYNTH_GEN_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sixdof/camera.h"
#include "sixdof/mesh.h"
#include "sixdof/sequence.h"

namespace sixdof {

enum class TrajectoryKind { kStatic, kTurntable, kSmoothRandom };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::kStatic;
  int length = 30;
  double camera_distance_mm = 800.0;
  // Camera elevation above the object's equator; shows the top face.
  double elevation_deg = 25.0;
  double initial_yaw_deg = 30.0;
  double frame_interval_ms = 1000.0 / 30.0;
  // Turntable.
  double deg_per_frame = 1.0;
  // Smooth random walk; every step has exactly these magnitudes.
  double speed_t_mm_per_frame = 0.0;
  double speed_r_deg_per_frame = 0.0;
  std::uint64_t seed = 0;
  // Smooth random walk: distance scale of the pull back to the start.
  double wander_radius_mm = 120.0;

  // Throws Error(kInvalidArgument) unless length >= 2 and speeds >= 0.
  void validate() const;
};

struct OccluderSpec {
  // One of 0, 0.15, 0.30, 0.45, 0.60, 0.75.
  double fraction = 0.0;
  // Horizontal panels rise from the bottom; vertical panels slide in from the left.
  OccluderOrientation orientation = OccluderOrientation::kHorizontal;
  double standoff_mm = 50.0;

  void validate() const;
};

// Ground-truth object poses (object -> camera) for the trajectory.
std::vector<Pose> generate_trajectory(const Mesh& mesh, const TrajectorySpec& spec);

struct OcclusionRecord {
  // Share of the unoccluded object mask hidden by the panel.
  double pixel_fraction = 0.0;
  // Panel edge position as a share of the object's projected extent along the
  // occluder axis.
  double extent_fraction = 0.0;
};

struct GenerationLog {
  std::vector<OcclusionRecord> occlusion;
};

// Renders the trajectory, applies the occluder panel and adds N(0, sigma^2)
// depth noise to every valid pixel. Frame i draws its noise from
// derive_seed(seed, i); output does not depend on `jobs`.
//
// The panel edge is placed per frame so that `fraction` of the unoccluded
// object pixels fall behind it; the panel is a fronto-parallel plane
// `standoff_mm` in front of the nearest object point.
Sequence generate_sequence(const Mesh& mesh, const TrajectorySpec& spec,
                           const std::optional<OccluderSpec>& occluder, double noise_sigma_mm,
                           const Intrinsics& k, std::uint64_t seed, GenerationLog* log = nullptr,
                           int jobs = 1);

// Default scenario label for a generated sequence.
ScenarioKind default_scenario(const TrajectorySpec& spec,
                              const std::optional<OccluderSpec>& occluder);

// Share of the pixels of the object rendered at `pose` whose observed depth is
// missing or differs from the rendering by more than `tolerance_mm`. Returns 0
// when the object is not in view.
double measure_occlusion(const DepthImage& observed, const Mesh& mesh, const Pose& pose,
                         const Intrinsics& k, double tolerance_mm = 15.0);

nlohmann::json trajectory_to_json(const TrajectorySpec& spec);
TrajectorySpec trajectory_from_json(const nlohmann::json& j);
std::string to_string(TrajectoryKind kind);
TrajectoryKind parse_trajectory_kind(const std::string& text);

}  // namespace sixdof

#endif  // SIXDOF_SYNTH_GEN_H_
