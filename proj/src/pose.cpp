// SPDX-License-Identifier: MIT

#include "sixdof/pose.h"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "sixdof/error.h"

namespace sixdof {

bool Rotation::is_rotation(const Mat3& m, double tolerance) {
  if (!m.allFinite()) return false;
  const Mat3 gram = m.transpose() * m;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tolerance) return false;
  return std::abs(m.determinant() - 1.0) <= tolerance;
}

Rotation Rotation::from_matrix(const Mat3& m, double tolerance) {
  if (!is_rotation(m, tolerance)) {
    throw Error(ErrorCode::kInvalidArgument,
                "matrix is not a proper rotation");
  }
  return Rotation(m, Unchecked{});
}

Rotation Rotation::nearest(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0
                ? -1.0
                : 1.0;
  return Rotation(svd.matrixU() * d * svd.matrixV().transpose(), Unchecked{});
}

Rotation Rotation::from_axis_angle(const Vec3& axis, double angle_rad) {
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(angle_rad)) {
    if (angle_rad == 0.0) return Rotation();
    throw Error(ErrorCode::kInvalidArgument, "axis must be a finite nonzero vector");
  }
  return Rotation(Eigen::AngleAxisd(angle_rad, axis / n).toRotationMatrix(),
                  Unchecked{});
}

Rotation Rotation::from_quaternion(const Eigen::Quaterniond& q) {
  return Rotation(q.normalized().toRotationMatrix(), Unchecked{});
}

Rotation Rotation::about_x(double angle_deg) {
  return from_axis_angle(Vec3::UnitX(), deg_to_rad(angle_deg));
}
Rotation Rotation::about_y(double angle_deg) {
  return from_axis_angle(Vec3::UnitY(), deg_to_rad(angle_deg));
}
Rotation Rotation::about_z(double angle_deg) {
  return from_axis_angle(Vec3::UnitZ(), deg_to_rad(angle_deg));
}

Eigen::Quaterniond Rotation::quaternion() const {
  return Eigen::Quaterniond(m_).normalized();
}

double Rotation::angle() const {
  const double c = std::clamp((m_.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

Pose::Pose(const Rotation& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!translation.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "translation must be finite");
  }
}

Pose Pose::from_translation(double x, double y, double z) {
  return Pose(Rotation(), Vec3(x, y, z));
}

Pose Pose::from_translation(const Vec3& t) { return Pose(Rotation(), t); }

Pose Pose::from_matrix(const Mat4& m, double tolerance) {
  const Eigen::RowVector4d bottom = m.row(3);
  if ((bottom - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > tolerance) {
    throw Error(ErrorCode::kInvalidArgument,
                "homogeneous matrix bottom row must be (0, 0, 0, 1)");
  }
  return Pose(Rotation::from_matrix(m.topLeftCorner<3, 3>(), tolerance),
              m.topRightCorner<3, 1>());
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_.matrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Pose Pose::inverse() const {
  const Rotation r_inv = rotation_.inverse();
  return Pose(r_inv, -(r_inv * translation_));
}

Pose Pose::operator*(const Pose& other) const {
  return Pose(rotation_ * other.rotation_,
              rotation_ * other.translation_ + translation_);
}

double delta_t(const Vec3& t1, const Vec3& t2) { return (t1 - t2).norm(); }

double delta_r(const Rotation& r1, const Rotation& r2) {
  const Mat3 rel = r1.matrix().transpose() * r2.matrix();
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  if (c < 0.9) return rad_to_deg(std::acos(c));
  // acos loses half the digits near zero angle; the skew part carries sin().
  const Vec3 axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0),
                  rel(1, 0) - rel(0, 1));
  return rad_to_deg(std::atan2(0.5 * axis.norm(), c));
}

PoseError pose_error(const Pose& reference, const Pose& estimate) {
  return {delta_t(reference.translation(), estimate.translation()),
          delta_r(reference.rotation(), estimate.rotation())};
}

Rotation euler_to_rotation(const EulerAngles& angles) {
  return Rotation::about_x(angles.alpha) * Rotation::about_y(angles.beta) *
         Rotation::about_z(angles.gamma);
}

EulerDecomposition rotation_to_euler(const Rotation& rotation) {
  const Mat3& r = rotation.matrix();
  EulerDecomposition out;
  const double beta = std::asin(std::clamp(r(0, 2), -1.0, 1.0));
  out.angles.beta = rad_to_deg(beta);
  if (90.0 - std::abs(out.angles.beta) <= 1e-6) {
    out.gimbal_lock = true;
    out.angles.alpha = rad_to_deg(std::atan2(r(2, 1), r(1, 1)));
    out.angles.gamma = 0.0;
    return out;
  }
  out.angles.alpha = rad_to_deg(std::atan2(-r(1, 2), r(2, 2)));
  out.angles.gamma = rad_to_deg(std::atan2(-r(0, 1), r(0, 0)));
  return out;
}

}  // namespace sixdof
