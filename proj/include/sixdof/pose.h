// SPDX-License-Identifier: MIT

#ifndef SIXDOF_POSE_H_
#define SIXDOF_POSE_H_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace sixdof {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/**
 * Proper rotation matrix (orthonormal, det = +1).
 *
 * Construction through from_matrix() validates the invariants; the algebraic
 * operations (product, inverse) preserve them up to rounding and skip the check.
 */
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  // Throws Error(kInvalidArgument) if m is not a rotation within tolerance.
  static Rotation from_matrix(const Mat3& m, double tolerance = 1e-9);
  // Projects m onto SO(3) (nearest rotation in Frobenius norm).
  static Rotation nearest(const Mat3& m);
  static Rotation from_axis_angle(const Vec3& axis, double angle_rad);
  static Rotation from_quaternion(const Eigen::Quaterniond& q);
  static Rotation about_x(double angle_deg);
  static Rotation about_y(double angle_deg);
  static Rotation about_z(double angle_deg);

  static bool is_rotation(const Mat3& m, double tolerance = 1e-9);

  const Mat3& matrix() const { return m_; }
  Rotation inverse() const { return Rotation(m_.transpose(), Unchecked{}); }
  Eigen::Quaterniond quaternion() const;
  // Angle of the rotation in radians, in [0, pi].
  double angle() const;

  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation operator*(const Rotation& other) const {
    return Rotation(m_ * other.m_, Unchecked{});
  }

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}

  Mat3 m_;
};

/**
 * Rigid transform x -> R x + t acting on column vectors, translation in mm.
 *
 * Convention used throughout the library: a Pose named `a_to_b` maps points
 * expressed in frame a into frame b, and `compose(a, b)` (or `a * b`) is the
 * matrix product, i.e. it applies b first and then a. An object pose is
 * therefore object -> camera.
 */
class Pose {
 public:
  Pose() : translation_(Vec3::Zero()) {}
  Pose(const Rotation& rotation, const Vec3& translation);

  static Pose identity() { return Pose(); }
  static Pose from_translation(double x, double y, double z);
  static Pose from_translation(const Vec3& t);
  // Expects a homogeneous matrix with bottom row (0, 0, 0, 1).
  static Pose from_matrix(const Mat4& m, double tolerance = 1e-9);

  const Rotation& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Mat4 matrix() const;
  Pose inverse() const;
  Vec3 apply(const Vec3& point) const {
    return rotation_ * point + translation_;
  }

  Pose operator*(const Pose& other) const;

 private:
  Rotation rotation_;
  Vec3 translation_;
};

inline Pose compose(const Pose& a, const Pose& b) { return a * b; }
inline Pose invert(const Pose& p) { return p.inverse(); }

// Euclidean distance between two translation vectors (mm).
double delta_t(const Vec3& t1, const Vec3& t2);
// Geodesic angle between two rotations, in degrees within [0, 180].
double delta_r(const Rotation& r1, const Rotation& r2);

struct PoseError {
  double translation_mm = 0.0;
  double rotation_deg = 0.0;
};
PoseError pose_error(const Pose& reference, const Pose& estimate);

// Intrinsic X-Y-Z Euler angles in degrees: R = Rx(alpha) * Ry(beta) * Rz(gamma).
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

struct EulerDecomposition {
  EulerAngles angles;
  // Set when |beta| is within 1e-6 degrees of 90; gamma is then pinned to 0.
  bool gimbal_lock = false;
};

Rotation euler_to_rotation(const EulerAngles& angles);
EulerDecomposition rotation_to_euler(const Rotation& rotation);

}  // namespace sixdof

#endif  // SIXDOF_POSE_H_
