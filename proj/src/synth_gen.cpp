// SPDX-License-Identifier: MIT

#include "sixdof/synth_gen.h"

#include <algorithm>
#include <cmath>

#include "sixdof/error.h"
#include "sixdof/parallel.h"
#include "sixdof/random.h"
#include "sixdof/render.h"

namespace sixdof {
namespace {

constexpr double kAllowedFractions[] = {0.0, 0.15, 0.30, 0.45, 0.60, 0.75};

Vec3 gaussian_vec(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double x = n(rng);
  const double y = n(rng);
  return {x, y, n(rng)};
}

Vec3 random_unit(Rng& rng) {
  Vec3 v;
  do {
    v = gaussian_vec(rng);
  } while (v.norm() < 1e-9);
  return v.normalized();
}

// Hides `fraction` of the object mask behind a panel and returns the record.
OcclusionRecord apply_panel(DepthImage& depth, const DepthImage& clean, const OccluderSpec& occ) {
  OcclusionRecord rec;
  const bool horizontal = occ.orientation == OccluderOrientation::kHorizontal;
  const int lines = horizontal ? clean.height() : clean.width();
  const int span = horizontal ? clean.width() : clean.height();
  std::vector<std::size_t> per_line(static_cast<std::size_t>(lines), 0);
  std::size_t total = 0;
  float nearest = std::numeric_limits<float>::infinity();
  int first = lines, last = -1;
  for (int l = 0; l < lines; ++l) {
    for (int s = 0; s < span; ++s) {
      const float d = horizontal ? clean.at(s, l) : clean.at(l, s);
      if (d > 0.0f) {
        ++per_line[l];
        nearest = std::min(nearest, d);
      }
    }
    if (per_line[l] > 0) {
      first = std::min(first, l);
      last = l;
    }
    total += per_line[l];
  }
  if (total == 0 || occ.fraction <= 0.0) return rec;

  // Lines are consumed from the bottom (horizontal) or the left (vertical).
  auto line_order = [&](int i) { return horizontal ? lines - 1 - i : i; };
  const double target = occ.fraction * static_cast<double>(total);
  std::size_t covered = 0;
  int count = 0;
  for (; count < lines; ++count) {
    const std::size_t next = covered + per_line[line_order(count)];
    if (std::abs(static_cast<double>(next) - target) > std::abs(static_cast<double>(covered) - target)) {
      break;
    }
    covered = next;
  }
  const float panel = std::max(1.0f, nearest - static_cast<float>(occ.standoff_mm));
  for (int i = 0; i < count; ++i) {
    const int l = line_order(i);
    for (int s = 0; s < span; ++s) {
      (horizontal ? depth.at(s, l) : depth.at(l, s)) = panel;
    }
  }
  rec.pixel_fraction = static_cast<double>(covered) / static_cast<double>(total);
  const double extent = last - first + 1;
  const double hidden = horizontal ? (last + 1) - (lines - count) : count - first;
  rec.extent_fraction = std::clamp(hidden / extent, 0.0, 1.0);
  return rec;
}

}  // namespace

void TrajectorySpec::validate() const {
  if (length < 2) throw Error(ErrorCode::kInvalidArgument, "trajectory length must be >= 2");
  if (!(camera_distance_mm > 0.0) || !(frame_interval_ms > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "distance and frame interval must be positive");
  }
  if (!(deg_per_frame >= 0.0) || !(speed_t_mm_per_frame >= 0.0) ||
      !(speed_r_deg_per_frame >= 0.0) || !(wander_radius_mm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "trajectory speeds must be >= 0");
  }
}

void OccluderSpec::validate() const {
  const bool ok = std::any_of(std::begin(kAllowedFractions), std::end(kAllowedFractions),
                              [&](double f) { return std::abs(f - fraction) < 1e-9; });
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument,
                "occluder fraction must be one of 0, 0.15, 0.30, 0.45, 0.60, 0.75");
  }
  if (!(standoff_mm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "standoff must be positive");
}

std::vector<Pose> generate_trajectory(const Mesh& mesh, const TrajectorySpec& spec) {
  spec.validate();
  mesh.validate();
  const Vec3 center = mesh.bbox_center();
  const Vec3 target(0.0, 0.0, spec.camera_distance_mm);
  const Rotation tilt = Rotation::about_x(-spec.elevation_deg);
  auto place = [&](const Rotation& r) { return Pose(r, target - (r * center)); };

  std::vector<Pose> poses;
  poses.reserve(static_cast<std::size_t>(spec.length));
  switch (spec.kind) {
    case TrajectoryKind::kStatic: {
      const Pose p = place(tilt * Rotation::about_y(spec.initial_yaw_deg));
      poses.assign(static_cast<std::size_t>(spec.length), p);
      break;
    }
    case TrajectoryKind::kTurntable: {
      for (int i = 0; i < spec.length; ++i) {
        poses.push_back(
            place(tilt * Rotation::about_y(spec.initial_yaw_deg + i * spec.deg_per_frame)));
      }
      break;
    }
    case TrajectoryKind::kSmoothRandom: {
      Rng rng(spec.seed);
      Pose p = place(tilt * Rotation::about_y(spec.initial_yaw_deg));
      const Vec3 t0 = p.translation();
      Vec3 dir_t = random_unit(rng);
      Vec3 dir_r = random_unit(rng);
      poses.push_back(p);
      for (int i = 1; i < spec.length; ++i) {
        // Ornstein-Uhlenbeck style drift of the unit step directions.
        Vec3 dt = dir_t + 0.3 * gaussian_vec(rng) - 0.5 * (p.translation() - t0) / spec.wander_radius_mm;
        if (dt.norm() < 1e-9) dt = random_unit(rng);
        dir_t = dt.normalized();
        Vec3 dr = dir_r + 0.3 * gaussian_vec(rng);
        if (dr.norm() < 1e-9) dr = random_unit(rng);
        dir_r = dr.normalized();
        const Rotation step = Rotation::from_axis_angle(dir_r, deg_to_rad(spec.speed_r_deg_per_frame));
        p = Pose(step * p.rotation(), p.translation() + spec.speed_t_mm_per_frame * dir_t);
        poses.push_back(p);
      }
      break;
    }
  }
  return poses;
}

ScenarioKind default_scenario(const TrajectorySpec& spec,
                              const std::optional<OccluderSpec>& occluder) {
  if (occluder) {
    return OcclusionScenario{static_cast<int>(std::lround(occluder->fraction * 100.0)),
                             occluder->orientation};
  }
  switch (spec.kind) {
    case TrajectoryKind::kStatic:
      return StabilityScenario{spec.camera_distance_mm > 1150.0 ? StabilityVariant::kFar
                                                                : StabilityVariant::kNear};
    case TrajectoryKind::kTurntable: return OcclusionScenario{0, OccluderOrientation::kHorizontal};
    case TrajectoryKind::kSmoothRandom: break;
  }
  if (spec.speed_t_mm_per_frame == 0.0) return InteractionScenario{InteractionVariant::kRotationOnly};
  if (spec.speed_r_deg_per_frame == 0.0) {
    return InteractionScenario{InteractionVariant::kTranslationOnly};
  }
  return InteractionScenario{InteractionVariant::kFreeSlow};
}

Sequence generate_sequence(const Mesh& mesh, const TrajectorySpec& spec,
                           const std::optional<OccluderSpec>& occluder, double noise_sigma_mm,
                           const Intrinsics& k, std::uint64_t seed, GenerationLog* log, int jobs) {
  k.validate();
  if (occluder) occluder->validate();
  if (!(noise_sigma_mm >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise sigma must be >= 0");
  }
  const std::vector<Pose> poses = generate_trajectory(mesh, spec);
  Sequence seq;
  seq.scenario = default_scenario(spec, occluder);
  seq.intrinsics = k;
  seq.frames.resize(poses.size());
  std::vector<OcclusionRecord> records(poses.size());

  parallel_for(poses.size(), jobs, [&](std::size_t i) {
    Frame& f = seq.frames[i];
    f.gt_pose = poses[i];
    f.timestamp_ms = static_cast<double>(i) * spec.frame_interval_ms;
    const DepthImage clean = render_depth(mesh, poses[i], k);
    f.depth = clean;
    if (occluder) records[i] = apply_panel(f.depth, clean, *occluder);
    if (noise_sigma_mm > 0.0) {
      Rng rng(derive_seed(seed, i));
      std::normal_distribution<double> noise(0.0, noise_sigma_mm);
      for (float& d : f.depth.data()) {
        if (d > 0.0f) d = static_cast<float>(std::max(d + noise(rng), 1.0));
      }
    }
  });
  if (log != nullptr) log->occlusion = std::move(records);
  return seq;
}

double measure_occlusion(const DepthImage& observed, const Mesh& mesh, const Pose& pose,
                         const Intrinsics& k, double tolerance_mm) {
  if (observed.width() != k.width || observed.height() != k.height) {
    throw Error(ErrorCode::kInvalidArgument, "depth size does not match intrinsics");
  }
  const DepthImage rendered = render_depth(mesh, pose, k);
  std::size_t object = 0, missing = 0;
  for (std::size_t i = 0; i < rendered.size(); ++i) {
    const float r = rendered.data()[i];
    if (r <= 0.0f) continue;
    ++object;
    const float o = observed.data()[i];
    if (o <= 0.0f || std::abs(o - r) > tolerance_mm) ++missing;
  }
  return object == 0 ? 0.0 : static_cast<double>(missing) / static_cast<double>(object);
}

std::string to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::kStatic: return "static";
    case TrajectoryKind::kTurntable: return "turntable";
    case TrajectoryKind::kSmoothRandom: return "smooth_random";
  }
  return "static";
}

TrajectoryKind parse_trajectory_kind(const std::string& text) {
  if (text == "static") return TrajectoryKind::kStatic;
  if (text == "turntable") return TrajectoryKind::kTurntable;
  if (text == "smooth_random") return TrajectoryKind::kSmoothRandom;
  throw Error(ErrorCode::kParseError, "unknown trajectory kind '" + text + "'");
}

nlohmann::json trajectory_to_json(const TrajectorySpec& s) {
  return {{"kind", to_string(s.kind)},
          {"length", s.length},
          {"camera_distance_mm", s.camera_distance_mm},
          {"elevation_deg", s.elevation_deg},
          {"initial_yaw_deg", s.initial_yaw_deg},
          {"frame_interval_ms", s.frame_interval_ms},
          {"deg_per_frame", s.deg_per_frame},
          {"speed_t_mm_per_frame", s.speed_t_mm_per_frame},
          {"speed_r_deg_per_frame", s.speed_r_deg_per_frame},
          {"seed", s.seed},
          {"wander_radius_mm", s.wander_radius_mm}};
}

TrajectorySpec trajectory_from_json(const nlohmann::json& j) {
  TrajectorySpec s;
  try {
    s.kind = parse_trajectory_kind(j.at("kind").get<std::string>());
    s.length = j.value("length", s.length);
    s.camera_distance_mm = j.value("camera_distance_mm", s.camera_distance_mm);
    s.elevation_deg = j.value("elevation_deg", s.elevation_deg);
    s.initial_yaw_deg = j.value("initial_yaw_deg", s.initial_yaw_deg);
    s.frame_interval_ms = j.value("frame_interval_ms", s.frame_interval_ms);
    s.deg_per_frame = j.value("deg_per_frame", s.deg_per_frame);
    s.speed_t_mm_per_frame = j.value("speed_t_mm_per_frame", s.speed_t_mm_per_frame);
    s.speed_r_deg_per_frame = j.value("speed_r_deg_per_frame", s.speed_r_deg_per_frame);
    s.seed = j.value("seed", s.seed);
    s.wander_radius_mm = j.value("wander_radius_mm", s.wander_radius_mm);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("trajectory: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace sixdof
