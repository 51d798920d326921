#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace manip {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Rigid transform on SO(3) x R^3. Rotation noise multiplies on the left of
/// the mean, translation noise is additive; everything downstream assumes
/// that convention.
struct Pose {
  Mat3 r = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Pose() = default;
  Pose(const Mat3& r_, const Vec3& t_) : r(r_), t(t_) {}

  static Pose identity() { return Pose(); }
};

constexpr double kRotationTol = 1e-9;

// Skew-symmetric cross-product matrix: hat(v) * w == v x w.
Mat3 hat(const Vec3& v);

bool is_rotation(const Mat3& m, double tol = kRotationTol);

// Nearest rotation matrix (polar factor); repairs drift after long chains.
Mat3 project_rotation(const Mat3& m);

// Rodrigues exponential. Rejects ||v|| >= pi (principal branch only).
Mat3 exp_so3(const Vec3& v);

// Inverse of exp_so3. Rejects rotations within 1e-6 of angle pi, where the
// axis is ambiguous.
Vec3 log_so3(const Mat3& r);

Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& a);
Vec3 transform_point(const Pose& a, const Vec3& p);

// Re-orthonormalizes the rotation when numerical drift exceeds tolerance.
Pose renormalized(const Pose& a);

double rotation_angle(const Mat3& r);

// Rotation about z by yaw radians.
Mat3 rot_z(double yaw);

double wrap_angle(double a);  // to (-pi, pi]

}  // namespace manip
