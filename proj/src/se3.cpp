#include "manip/se3.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace manip {

Mat3 hat(const Vec3& v) {
  if (!v.allFinite()) throw std::invalid_argument("hat: non-finite input");
  Mat3 s;
  s << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return s;
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
  return ortho <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

Mat3 project_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

Mat3 exp_so3(const Vec3& v) {
  if (!v.allFinite()) throw std::invalid_argument("exp_so3: non-finite input");
  const double theta = v.norm();
  if (theta >= M_PI) throw std::invalid_argument("exp_so3: angle >= pi");
  const Mat3 k = hat(v);
  double a, b;  // sin(t)/t and (1-cos(t))/t^2
  if (theta < 1e-8) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Mat3::Identity() + a * k + b * (k * k);
}

double rotation_angle(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c);
}

Vec3 log_so3(const Mat3& r) {
  if (!is_rotation(r, 1e-6)) throw std::invalid_argument("log_so3: not a rotation matrix");
  const double theta = rotation_angle(r);
  if (theta >= M_PI - 1e-6) throw std::invalid_argument("log_so3: angle too close to pi");
  Vec3 w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (theta < 1e-8) return 0.5 * w;  // sin(t)/t ~ 1
  return (theta / (2.0 * std::sin(theta))) * w;
}

Pose compose(const Pose& a, const Pose& b) { return Pose(a.r * b.r, a.r * b.t + a.t); }

Pose invert(const Pose& a) {
  Mat3 rt = a.r.transpose();
  return Pose(rt, -(rt * a.t));
}

Vec3 transform_point(const Pose& a, const Vec3& p) { return a.r * p + a.t; }

Pose renormalized(const Pose& a) {
  if (is_rotation(a.r)) return a;
  return Pose(project_rotation(a.r), a.t);
}

Mat3 rot_z(double yaw) {
  Mat3 r = Mat3::Identity();
  const double c = std::cos(yaw), s = std::sin(yaw);
  r(0, 0) = c;
  r(0, 1) = -s;
  r(1, 0) = s;
  r(1, 1) = c;
  return r;
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

}  // namespace manip
