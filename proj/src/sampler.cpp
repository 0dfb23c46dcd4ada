// SPDX-License-Identifier: MIT

#include "sixdof/sampler.h"

#include <cmath>

#include "sixdof/error.h"
#include "sixdof/render.h"

namespace sixdof {

void PerturbationConfig::validate() const {
  if (!(delta_t_mm >= 0.0) || !(delta_r_deg >= 0.0) || !std::isfinite(delta_t_mm) ||
      !std::isfinite(delta_r_deg)) {
    throw Error(ErrorCode::kInvalidArgument, "perturbation scales must be finite and >= 0");
  }
}

Vec3 direction_from(double theta, double x) {
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  return {s * std::cos(theta), s * std::sin(theta), x};
}

Vec3 sample_direction(Rng& rng) {
  std::uniform_real_distribution<double> theta(-kPi, kPi);
  std::uniform_real_distribution<double> x(-1.0, 1.0);
  const double t = theta(rng);
  return direction_from(t, x(rng));
}

Pose sample_perturbation(const PerturbationConfig& config, Rng& rng) {
  config.validate();
  if (config.mode == PerturbationMode::kSpherical) {
    std::normal_distribution<double> unit(0.0, 1.0);
    const Vec3 t_dir = sample_direction(rng);
    const double m_t = config.delta_t_mm * unit(rng);
    const Vec3 r_axis = sample_direction(rng);
    const double m_r = config.delta_r_deg * unit(rng);
    return Pose(Rotation::from_axis_angle(r_axis, deg_to_rad(m_r)), m_t * t_dir);
  }
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vec3 t;
  for (int i = 0; i < 3; ++i) t[i] = config.delta_t_mm * unit(rng);
  EulerAngles e;
  e.alpha = config.delta_r_deg * unit(rng);
  e.beta = config.delta_r_deg * unit(rng);
  e.gamma = config.delta_r_deg * unit(rng);
  return Pose(euler_to_rotation(e), t);
}

Pose label_to_delta(const Vec6& label) {
  return Pose(euler_to_rotation({label[3], label[4], label[5]}), label.head<3>());
}

Vec6 delta_to_label(const Pose& delta) {
  const EulerAngles e = rotation_to_euler(delta.rotation()).angles;
  Vec6 label;
  label << delta.translation(), e.alpha, e.beta, e.gamma;
  return label;
}

Vec6 label_between(const Pose& pred, const Pose& gt) {
  const Rotation r = pred.rotation().inverse() * gt.rotation();
  return delta_to_label(Pose(r, gt.translation() - pred.translation()));
}

Pose apply_label(const Pose& pred, const Vec6& label) {
  const Pose d = label_to_delta(label);
  return Pose(pred.rotation() * d.rotation(), pred.translation() + d.translation());
}

PairGenerator::PairGenerator(std::vector<Pose> base_poses, PerturbationConfig config,
                             std::uint64_t seed)
    : base_poses_(std::move(base_poses)), config_(config), seed_(seed) {
  if (base_poses_.empty()) throw Error(ErrorCode::kInvalidArgument, "no base poses");
  config_.validate();
}

PosePair PairGenerator::pair(std::uint64_t index) const {
  Rng rng(derive_seed(seed_, index));
  const Pose delta = sample_perturbation(config_, rng);
  PosePair p;
  p.pose_gt = base_poses_[index % base_poses_.size()];
  p.pose_pred = Pose(p.pose_gt.rotation() * delta.rotation().inverse(),
                     p.pose_gt.translation() - delta.translation());
  p.label = delta_to_label(delta);
  return p;
}

Intrinsics crop_intrinsics(const Intrinsics& k, const Vec3& center_camera, double diameter_mm,
                           const CropOptions& options) {
  if (options.size_px < 1 || !(options.scale > 0.0) || !(diameter_mm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid crop options");
  }
  const Projection p = project(center_camera, k);
  const double side_px = options.scale * diameter_mm * k.fx / p.depth_mm;
  const double s = options.size_px / side_px;
  const double half = 0.5 * side_px;
  Intrinsics c;
  c.fx = k.fx * s;
  c.fy = k.fy * s;
  c.cx = (k.cx - (p.pixel.x() - half)) * s;
  c.cy = (k.cy - (p.pixel.y() - half)) * s;
  c.width = options.size_px;
  c.height = options.size_px;
  return c;
}

RenderedPair render_pair(const Mesh& mesh, const PosePair& pair, const Intrinsics& k,
                         const CropOptions& options) {
  const Vec3 center = pair.pose_pred.apply(mesh.bbox_center());
  RenderedPair r;
  r.crop = crop_intrinsics(k, center, mesh.max_dimension(), options);
  r.depth_gt = render_depth(mesh, pair.pose_gt, r.crop);
  r.depth_pred = render_depth(mesh, pair.pose_pred, r.crop);
  return r;
}

void generate_pairs(const std::vector<Pose>& base_poses, const PerturbationConfig& config,
                    std::uint64_t n, std::uint64_t seed,
                    const std::function<void(const PairSinkItem&)>& sink, const Mesh* mesh,
                    const Intrinsics* k, const CropOptions& crop) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "pair count must be >= 1");
  if (mesh != nullptr && k == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "rendering requires intrinsics");
  }
  PairGenerator gen(base_poses, config, seed);
  for (std::uint64_t i = 0; i < n; ++i) {
    const PosePair p = gen.next();
    if (mesh != nullptr) {
      const RenderedPair r = render_pair(*mesh, p, *k, crop);
      sink({i, p, &r});
    } else {
      sink({i, p, nullptr});
    }
  }
}

}  // namespace sixdof
