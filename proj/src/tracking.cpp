// SPDX-License-Identifier: MIT

#include "sixdof/tracking.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "sixdof/error.h"
#include "sixdof/random.h"

namespace sixdof {

std::vector<SurfaceSample> sample_surface(const Mesh& mesh, int count, std::uint64_t seed) {
  mesh.validate();
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "sample count must be positive");
  std::vector<double> cumulative;
  cumulative.reserve(mesh.triangles.size());
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    total += 0.5 * (mesh.vertices[t[1]] - a).cross(mesh.vertices[t[2]] - a).norm();
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kDegenerateInput, "mesh has zero surface area");

  Rng rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<SurfaceSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double pick = u01(rng) * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const std::size_t tri = std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
    const auto& t = mesh.triangles[tri];
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    const double s = std::sqrt(u01(rng));
    const double r = u01(rng);
    out.push_back({(1.0 - s) * a + s * (1.0 - r) * b + s * r * c,
                   (b - a).cross(c - a).normalized()});
  }
  return out;
}

IcpTracker::IcpTracker(IcpOptions options) : options_(options) {
  if (options_.model_samples < 1 || options_.max_observed_points < 1 ||
      options_.max_iterations < 1 || !(options_.crop_scale > 0.0) || options_.normal_step_px < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid ICP options");
  }
}

void IcpTracker::init(const Mesh& mesh, const Pose& pose0) {
  model_ = sample_surface(mesh, options_.model_samples, options_.seed);
  std::vector<Vec3> points;
  points.reserve(model_.size());
  for (const auto& s : model_) points.push_back(s.point);
  index_ = KdTree(std::move(points));
  center_ = mesh.bbox_center();
  diameter_ = mesh.max_dimension();
  pose_ = pose0;
}

std::vector<IcpTracker::Observed> IcpTracker::gather(const FrameView& frame) const {
  const Intrinsics& k = frame.intrinsics;
  const DepthImage& depth = frame.depth;
  const Vec3 c = pose_.apply(center_);
  const double radius = 0.5 * options_.crop_scale * diameter_;

  int x0 = 0, y0 = 0, x1 = depth.width(), y1 = depth.height();
  if (c.z() - radius > 1.0) {
    const Projection p = project(c, k);
    const double reach_x = k.fx * radius / (c.z() - radius);
    const double reach_y = k.fy * radius / (c.z() - radius);
    x0 = std::max(x0, static_cast<int>(std::floor(p.pixel.x() - reach_x)));
    x1 = std::min(x1, static_cast<int>(std::ceil(p.pixel.x() + reach_x)));
    y0 = std::max(y0, static_cast<int>(std::floor(p.pixel.y() - reach_y)));
    y1 = std::min(y1, static_cast<int>(std::ceil(p.pixel.y() + reach_y)));
  }
  if (x1 <= x0 || y1 <= y0) return {};

  auto point_at = [&](int x, int y) {
    return back_project(pixel_center(x, y), depth.at(x, y), k);
  };
  const double r2 = radius * radius;
  std::size_t candidates = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      if (depth.at(x, y) > 0.0f && (point_at(x, y) - c).squaredNorm() <= r2) ++candidates;
    }
  }
  const int stride = std::max(
      1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(candidates) /
                                               options_.max_observed_points))));
  const int s = options_.normal_step_px;
  std::vector<Observed> out;
  out.reserve(std::min<std::size_t>(candidates, options_.max_observed_points * 2));
  for (int y = y0; y < y1; y += stride) {
    for (int x = x0; x < x1; x += stride) {
      const float d = depth.at(x, y);
      if (d <= 0.0f) continue;
      const Vec3 p = point_at(x, y);
      if ((p - c).squaredNorm() > r2) continue;
      if (!depth.in_bounds(x - s, y - s) || !depth.in_bounds(x + s, y + s)) continue;
      const float l = depth.at(x - s, y), r = depth.at(x + s, y);
      const float u = depth.at(x, y - s), b = depth.at(x, y + s);
      const double jump = options_.normal_max_jump_mm;
      if (l <= 0.0f || r <= 0.0f || u <= 0.0f || b <= 0.0f || std::abs(l - d) > jump ||
          std::abs(r - d) > jump || std::abs(u - d) > jump || std::abs(b - d) > jump) {
        continue;
      }
      const Vec3 dx = point_at(x + s, y) - point_at(x - s, y);
      const Vec3 dy = point_at(x, y + s) - point_at(x, y - s);
      Vec3 n = dx.cross(dy);
      const double len = n.norm();
      if (!(len > 0.0)) continue;
      n /= len;
      if (n.dot(p) > 0.0) n = -n;
      out.push_back({p, n});
    }
  }
  return out;
}

TrackResult IcpTracker::update(const FrameView& frame) {
  if (model_.empty()) throw Error(ErrorCode::kInvalidArgument, "tracker used before init");
  const std::vector<Observed> obs = gather(frame);
  TrackResult result;
  result.pose = pose_;

  const double cos_max = std::cos(deg_to_rad(options_.max_normal_angle_deg));
  Pose g = pose_.inverse();  // camera -> object
  Pose g_prev = g;
  double prev_cost = 0.0;

  for (int it = 0; it < options_.max_iterations; ++it) {
    Eigen::Matrix<double, 6, 6> a = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> rhs = Eigen::Matrix<double, 6, 1>::Zero();
    double sum_sq = 0.0;
    int inliers = 0;
    for (const Observed& o : obs) {
      const Vec3 q = g.apply(o.point);
      const KdTree::Hit hit = index_.nearest(q, options_.max_distance_mm);
      if (hit.index < 0) continue;
      const SurfaceSample& m = model_[static_cast<std::size_t>(hit.index)];
      const Vec3 nq = g.rotation() * o.normal;
      if (std::abs(nq.dot(m.normal)) < cos_max) continue;
      const double r = m.normal.dot(q - m.point);
      Eigen::Matrix<double, 6, 1> j;
      j << q.cross(m.normal), m.normal;
      a.selfadjointView<Eigen::Lower>().rankUpdate(j);
      rhs += j * r;
      sum_sq += r * r;
      ++inliers;
    }
    const double fraction = obs.empty() ? 0.0 : static_cast<double>(inliers) / obs.size();
    const bool enough = inliers >= options_.min_inliers && fraction >= options_.min_inlier_fraction;
    if (it == 0) {
      result.inlier_fraction = fraction;
      if (!enough) {
        result.low_overlap = true;
        return result;
      }
    }
    const double cost = enough ? sum_sq / inliers : std::numeric_limits<double>::infinity();
    if (it > 0 && cost > prev_cost) {
      g = g_prev;
      break;
    }
    result.residual_history.push_back(cost);
    result.inlier_fraction = fraction;
    if (it > 0 && std::abs(prev_cost - cost) <= options_.relative_tolerance * prev_cost) break;
    if (it + 1 == options_.max_iterations) break;

    a.triangularView<Eigen::Upper>() = a.transpose();
    const Eigen::Matrix<double, 6, 1> x = a.ldlt().solve(-rhs);
    if (!x.allFinite()) break;
    const Vec3 omega = x.head<3>();
    const double angle = omega.norm();
    const Rotation dr = angle > 0.0 ? Rotation::from_axis_angle(omega / angle, angle) : Rotation();
    g_prev = g;
    g = Pose(dr, x.tail<3>()) * g;
    prev_cost = cost;
    ++result.iterations;
  }
  pose_ = g.inverse();
  result.pose = pose_;
  return result;
}

void EchoTracker::init(const Mesh& mesh, const Pose& pose0) {
  mesh.validate();
  pose_ = pose0;
}

TrackResult EchoTracker::update(const FrameView& frame) {
  if (frame.index >= truth_.size()) {
    throw Error(ErrorCode::kMissingFrame, "echo tracker has no pose for this frame");
  }
  pose_ = truth_[frame.index];
  return track_result(pose_);
}

void FrozenTracker::init(const Mesh& mesh, const Pose& pose0) {
  mesh.validate();
  pose_ = pose0;
}

void PlaybackTracker::init(const Mesh& mesh, const Pose& pose0) {
  mesh.validate();
  pose_ = pose0;
}

TrackResult PlaybackTracker::update(const FrameView& frame) {
  if (frame.index >= script_.size()) {
    throw Error(ErrorCode::kMissingFrame, "playback script has no pose for this frame");
  }
  pose_ = script_[frame.index];
  return track_result(pose_);
}

}  // namespace sixdof
