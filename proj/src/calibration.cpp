// SPDX-License-Identifier: MIT

#include "sixdof/calibration.h"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "sixdof/error.h"

namespace sixdof {

Pose chain_object_pose(const RigTransforms& rig) {
  const Pose objm_to_kntm = rig.kntm_to_vcn.inverse() * rig.objm_to_vcn;
  return rig.kntm_to_knt * objm_to_kntm * rig.obj_to_objm;
}

Vec3 marker_centroid(std::span<const Vec3> markers) {
  if (markers.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "marker set is empty");
  }
  Vec3 sum = Vec3::Zero();
  for (const auto& m : markers) sum += m;
  return sum / static_cast<double>(markers.size());
}

// ---------------------------------------------------------------------------
// Sphere fit

namespace {

double sphere_cost(std::span<const Vec3> q, const Vec3& c, double r) {
  double cost = 0.0;
  for (const auto& p : q) {
    const double e = (p - c).norm() - r;
    cost += e * e;
  }
  return cost;
}

}  // namespace

SphereFit fit_sphere(std::span<const Vec3> points) {
  constexpr double kMaxCondition = 1e8;
  const std::size_t n = points.size();
  if (n < 4) {
    throw Error(ErrorCode::kDegenerateInput, "sphere fit needs at least 4 points");
  }

  // Normalize for conditioning: zero mean, unit RMS radius.
  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(n);
  double scale = 0.0;
  for (const auto& p : points) scale += (p - mean).squaredNorm();
  scale = std::sqrt(scale / static_cast<double>(n));
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::kDegenerateInput, "all probe points coincide");
  }
  std::vector<Vec3> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = (points[i] - mean) / scale;

  // |q|^2 = 2 c.q + (r^2 - |c|^2)
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.row(i) << 2.0 * q[i].x(), 2.0 * q[i].y(), 2.0 * q[i].z(), 1.0;
    b(i) = q[i].squaredNorm();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(3) > 0.0) || sv(0) / sv(3) > kMaxCondition) {
    throw Error(ErrorCode::kDegenerateInput,
                "probe points are coplanar; the motion did not sweep a sphere");
  }
  const Eigen::Vector4d x = svd.solve(b);
  Vec3 c = x.head<3>();
  const double r2 = x(3) + c.squaredNorm();
  if (!(r2 > 0.0)) {
    throw Error(ErrorCode::kDegenerateInput, "algebraic fit produced no sphere");
  }
  double r = std::sqrt(r2);

  // Gauss-Newton on geometric residuals |q - c| - r.
  double cost = sphere_cost(q, c, r);
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (const auto& p : q) {
      const Vec3 d = p - c;
      const double dist = d.norm();
      if (!(dist > 0.0)) continue;
      Eigen::Vector4d j;
      j << -d / dist, -1.0;
      const double e = dist - r;
      jtj += j * j.transpose();
      jtr += j * e;
    }
    const Eigen::Vector4d step = jtj.ldlt().solve(-jtr);
    if (!step.allFinite()) break;
    const Vec3 c_new = c + step.head<3>();
    const double r_new = r + step(3);
    const double cost_new = sphere_cost(q, c_new, r_new);
    if (!(cost_new <= cost)) break;
    c = c_new;
    r = r_new;
    const bool converged = step.norm() < 1e-15 || cost - cost_new <= 1e-30;
    cost = cost_new;
    if (converged) break;
  }

  SphereFit fit;
  fit.center = mean + scale * c;
  fit.radius = scale * r;
  double sum_sq = 0.0;
  for (const auto& p : points) {
    const double e = (p - fit.center).norm() - fit.radius;
    sum_sq += e * e;
  }
  fit.rms_residual = std::sqrt(sum_sq / static_cast<double>(n));
  return fit;
}

// ---------------------------------------------------------------------------
// PnP

namespace {

double pnp_cost(std::span<const Correspondence2D3D> corr, const Intrinsics& k,
                const Pose& pose) {
  double sum = 0.0;
  for (const auto& c : corr) {
    const Vec3 pc = pose.apply(c.world_point);
    if (!(pc.z() > 0.0)) return std::numeric_limits<double>::infinity();
    const Vec2 uv(k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy);
    sum += (uv - c.image_point).squaredNorm();
  }
  return sum / static_cast<double>(corr.size());
}

Pose dlt_initialize(std::span<const Correspondence2D3D> corr, const Intrinsics& k) {
  const std::size_t n = corr.size();

  // Normalized camera coordinates, then Hartley conditioning of both sides.
  std::vector<Vec2> xn(n);
  Vec2 m2 = Vec2::Zero();
  Vec3 m3 = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    xn[i] = {(corr[i].image_point.x() - k.cx) / k.fx,
             (corr[i].image_point.y() - k.cy) / k.fy};
    m2 += xn[i];
    m3 += corr[i].world_point;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  double s2 = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s2 += (xn[i] - m2).norm();
    s3 += (corr[i].world_point - m3).norm();
  }
  s2 = std::sqrt(2.0) * static_cast<double>(n) / s2;
  s3 = std::sqrt(3.0) * static_cast<double>(n) / s3;

  Eigen::Matrix3d t2 = Eigen::Matrix3d::Identity();
  t2(0, 0) = t2(1, 1) = s2;
  t2.topRightCorner<2, 1>() = -s2 * m2;
  Eigen::Matrix4d t3 = Eigen::Matrix4d::Identity();
  t3.topLeftCorner<3, 3>() *= s3;
  t3.topRightCorner<3, 1>() = -s3 * m3;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 12);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 x = s2 * (xn[i] - m2);
    const Eigen::Vector4d w(s3 * (corr[i].world_point.x() - m3.x()),
                            s3 * (corr[i].world_point.y() - m3.y()),
                            s3 * (corr[i].world_point.z() - m3.z()), 1.0);
    a.block<1, 4>(2 * i, 0) = w.transpose();
    a.block<1, 4>(2 * i, 8) = -x.x() * w.transpose();
    a.block<1, 4>(2 * i + 1, 4) = w.transpose();
    a.block<1, 4>(2 * i + 1, 8) = -x.y() * w.transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd h = svd.matrixV().col(11);
  Eigen::Matrix<double, 3, 4> pn;
  pn << h.segment<4>(0).transpose(), h.segment<4>(4).transpose(),
      h.segment<4>(8).transpose();
  Eigen::Matrix<double, 3, 4> p = t2.inverse() * pn * t3;

  Mat3 m = p.leftCols<3>();
  if (m.determinant() < 0.0) {
    p = -p;
    m = -m;
  }
  Eigen::JacobiSVD<Mat3> msvd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double s = msvd.singularValues().mean();
  const Rotation r = Rotation::nearest(m);
  return Pose(r, p.col(3) / s);
}

}  // namespace

double reprojection_rms(std::span<const Correspondence2D3D> correspondences,
                        const Intrinsics& k, const Pose& world_to_camera) {
  if (correspondences.empty()) return 0.0;
  return std::sqrt(pnp_cost(correspondences, k, world_to_camera));
}

PnpResult solve_pnp(std::span<const Correspondence2D3D> correspondences,
                    const Intrinsics& k, const PnpOptions& options) {
  k.validate();
  const std::size_t n = correspondences.size();
  if (n < 6) {
    throw Error(ErrorCode::kInsufficientPoints,
                "PnP needs at least 6 correspondences");
  }
  {
    Vec3 mean = Vec3::Zero();
    for (const auto& c : correspondences) mean += c.world_point;
    mean /= static_cast<double>(n);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& c : correspondences) {
      const Vec3 d = c.world_point - mean;
      cov += d * d.transpose();
    }
    const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Mat3>(cov).eigenvalues();
    if (!(ev(2) > 0.0) || std::sqrt(std::max(ev(0), 0.0) / ev(2)) < 1e-6) {
      throw Error(ErrorCode::kDegenerateInput,
                  "world points are coplanar; DLT is degenerate");
    }
  }

  PnpResult result;
  Pose pose = dlt_initialize(correspondences, k);
  double cost = pnp_cost(correspondences, k, pose);
  if (!std::isfinite(cost)) {
    throw Error(ErrorCode::kNoConvergence,
                "DLT initialization places points behind the camera");
  }
  result.cost_history.push_back(cost);

  double lambda = options.initial_lambda;
  using Mat6 = Eigen::Matrix<double, 6, 6>;
  using Vec6 = Eigen::Matrix<double, 6, 1>;
  int iter = 0;
  bool converged = false;
  while (iter < options.max_iterations && !converged) {
    ++iter;
    Mat6 jtj = Mat6::Zero();
    Vec6 jtr = Vec6::Zero();
    for (const auto& c : correspondences) {
      const Vec3 pc = pose.apply(c.world_point);
      const double iz = 1.0 / pc.z();
      const Vec2 uv(k.fx * pc.x() * iz + k.cx, k.fy * pc.y() * iz + k.cy);
      const Vec2 e = uv - c.image_point;
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << k.fx * iz, 0.0, -k.fx * pc.x() * iz * iz, 0.0, k.fy * iz,
          -k.fy * pc.y() * iz * iz;
      // Left perturbation: pc' = exp(w) pc + v.
      Eigen::Matrix<double, 3, 6> dpc;
      dpc.leftCols<3>() << 0.0, pc.z(), -pc.y(), -pc.z(), 0.0, pc.x(), pc.y(),
          -pc.x(), 0.0;
      dpc.rightCols<3>() = Mat3::Identity();
      const Eigen::Matrix<double, 2, 6> j = dproj * dpc;
      jtj += j.transpose() * j;
      jtr += j.transpose() * e;
    }

    bool accepted = false;
    while (!accepted && lambda < 1e16) {
      Mat6 damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Vec6 step = damped.ldlt().solve(-jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Vec3 w = step.head<3>();
      const double angle = w.norm();
      const Rotation dr = angle > 0.0 ? Rotation::from_axis_angle(w, angle) : Rotation();
      const Pose candidate = Pose(dr, step.tail<3>()) * pose;
      const double new_cost = pnp_cost(correspondences, k, candidate);
      if (new_cost < cost) {
        const double decrease = cost - new_cost;
        pose = candidate;
        cost = new_cost;
        result.cost_history.push_back(cost);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        converged = decrease <= 1e-14 * cost || step.norm() < 1e-14 || cost <= 1e-28;
      } else {
        lambda *= 10.0;
      }
    }
    // No damping makes progress: already at a minimum.
    if (!accepted) converged = true;
  }

  result.world_to_camera = pose;
  result.iterations = iter;
  result.rms_reprojection_px = std::sqrt(cost);
  double mean = 0.0;
  for (const auto& c : correspondences) {
    const Projection pr = project(pose.apply(c.world_point), k);
    mean += (pr.pixel - c.image_point).norm();
  }
  result.mean_reprojection_px = mean / static_cast<double>(n);
  if (!converged && result.rms_reprojection_px > options.max_rms_px) {
    throw Error(ErrorCode::kNoConvergence,
                "Levenberg-Marquardt hit the iteration cap above the residual threshold");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Temporal synchronization

std::optional<Vec3> interpolate_track(const MocapTrack& track, double time_ms) {
  if (track.empty() || time_ms < track.front().time_ms ||
      time_ms > track.back().time_ms) {
    return std::nullopt;
  }
  auto it = std::upper_bound(
      track.begin(), track.end(), time_ms,
      [](double t, const TimedPoint3& s) { return t < s.time_ms; });
  if (it == track.end()) return track.back().position;
  const TimedPoint3& hi = *it;
  const TimedPoint3& lo = *(it - 1);
  const double span = hi.time_ms - lo.time_ms;
  const double s = span > 0.0 ? (time_ms - lo.time_ms) / span : 0.0;
  return ((1.0 - s) * lo.position + s * hi.position).eval();
}

namespace {

struct SyncProblem {
  std::span<const MocapTrack> tracks;
  std::span<const TimedDetection> detections;
  const Intrinsics& k;
  const Pose& mocap_to_camera;
  // Detections used at every candidate; empty means "all that overlap".
  std::vector<std::size_t> subset;

  std::optional<double> mse(double offset_ms, std::size_t min_count) const {
    double sum = 0.0;
    std::size_t count = 0;
    auto visit = [&](const TimedDetection& d) {
      if (d.track >= tracks.size()) return;
      const auto p = interpolate_track(tracks[d.track], d.time_ms + offset_ms);
      if (!p) return;
      const Vec3 pc = mocap_to_camera.apply(*p);
      if (!(pc.z() > 0.0)) return;
      const Vec2 uv(k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy);
      sum += (uv - d.pixel).squaredNorm();
      ++count;
    };
    if (subset.empty()) {
      for (const auto& d : detections) visit(d);
    } else {
      for (std::size_t i : subset) visit(detections[i]);
    }
    if (count == 0 || count < min_count) return std::nullopt;
    return sum / static_cast<double>(count);
  }
};

}  // namespace

std::optional<double> sync_residual(std::span<const MocapTrack> tracks,
                                    std::span<const TimedDetection> detections,
                                    const Intrinsics& k,
                                    const Pose& mocap_to_camera, double offset_ms,
                                    std::size_t min_detections) {
  const SyncProblem problem{tracks, detections, k, mocap_to_camera, {}};
  const auto m = problem.mse(offset_ms, min_detections);
  if (!m) return std::nullopt;
  return std::sqrt(*m);
}

SyncResult estimate_time_offset(std::span<const MocapTrack> tracks,
                                std::span<const TimedDetection> detections,
                                const Intrinsics& k, const Pose& mocap_to_camera,
                                const SyncOptions& options) {
  k.validate();
  if (!(options.step_ms > 0.0) || !(options.window_ms >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sync grid must have positive step");
  }
  SyncProblem problem{tracks, detections, k, mocap_to_camera, {}};

  // Prefer a fixed detection subset valid over the whole window so that every
  // candidate is scored on the same data.
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    if (d.track >= tracks.size() || tracks[d.track].empty()) continue;
    const auto& tr = tracks[d.track];
    if (d.time_ms - options.window_ms >= tr.front().time_ms &&
        d.time_ms + options.window_ms <= tr.back().time_ms) {
      problem.subset.push_back(i);
    }
  }
  if (problem.subset.size() < std::max<std::size_t>(options.min_detections, 1)) {
    problem.subset.clear();
  }

  const int half = static_cast<int>(std::llround(options.window_ms / options.step_ms));
  SyncResult result;
  int best = -1;
  double best_mse = std::numeric_limits<double>::infinity();
  double worst_mse = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double offset = i * options.step_ms;
    const auto m = problem.mse(offset, options.min_detections);
    result.grid_offsets_ms.push_back(offset);
    result.grid_residuals_px.push_back(m ? std::sqrt(*m)
                                         : std::numeric_limits<double>::quiet_NaN());
    if (!m) continue;
    worst_mse = std::max(worst_mse, *m);
    if (*m < best_mse) {
      best_mse = *m;
      best = i + half;
    }
  }
  if (best < 0) {
    throw Error(ErrorCode::kNoOverlap,
                "shifted detection times never overlap the mocap track");
  }
  const double best_rms = std::sqrt(best_mse);
  const double worst_rms = std::sqrt(worst_mse);
  if (worst_rms - best_rms <= options.flat_tolerance * best_rms + 1e-12) {
    throw Error(ErrorCode::kFlatObjective,
                "reprojection error does not depend on the offset; the target "
                "must move with varying speed");
  }

  result.delta_t_ms = result.grid_offsets_ms[best];
  result.residual_px = best_rms;

  const auto& g = result.grid_residuals_px;
  if (best > 0 && best + 1 < static_cast<int>(g.size()) && std::isfinite(g[best - 1]) &&
      std::isfinite(g[best + 1])) {
    const double fm = g[best - 1] * g[best - 1];
    const double f0 = best_mse;
    const double fp = g[best + 1] * g[best + 1];
    const double denom = fm - 2.0 * f0 + fp;
    if (denom > 0.0) {
      const double shift = 0.5 * (fm - fp) / denom;
      const double refined = result.delta_t_ms + shift * options.step_ms;
      const auto m = problem.mse(refined, options.min_detections);
      if (m && *m <= best_mse) {
        result.delta_t_ms = refined;
        result.residual_px = std::sqrt(*m);
      }
    }
  }
  return result;
}

void apply_depth_correction(DepthImage& depth, const DepthCorrection& correction) {
  if (!correction.enabled) return;
  const bool per_pixel_scale = !correction.scale_map.empty();
  const bool per_pixel_offset = !correction.offset_map.empty();
  if ((per_pixel_scale && correction.scale_map.size() != depth.size()) ||
      (per_pixel_offset && correction.offset_map.size() != depth.size())) {
    throw Error(ErrorCode::kInvalidArgument,
                "depth correction maps must match the image size");
  }
  for (std::size_t i = 0; i < depth.size(); ++i) {
    float& d = depth.data()[i];
    if (d <= 0.0f) continue;
    const double s = per_pixel_scale ? correction.scale_map[i] : correction.scale;
    const double o = per_pixel_offset ? correction.offset_map[i] : correction.offset_mm;
    d = static_cast<float>(std::max(0.0, s * d + o));
  }
}

}  // namespace sixdof
