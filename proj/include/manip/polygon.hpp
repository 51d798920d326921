#pragma once

#include <vector>

#include "manip/se3.hpp"

namespace manip {

/// Strictly convex polygon, CCW vertex list in the object frame (meters).
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  static ConvexPolygon rectangle(double size_x, double size_y);  // centered

  const std::vector<Vec2>& vertices() const { return verts_; }
  const Vec2& centroid() const { return centroid_; }  // area centroid, object frame

  /// Support interval [min, max] of the polygon at planar pose (x, y, theta)
  /// projected on unit axis c (gripper frame).
  void support_interval(double x, double y, double theta, const Vec2& axis, double& lo,
                        double& hi) const;

  /// Support width along axis as a function of orientation only.
  double width(double theta, const Vec2& axis) const;

  /// One-sided derivative of width w.r.t. theta (valid a.e.; at vertex
  /// changes it returns the right-hand derivative).
  double width_derivative(double theta, const Vec2& axis) const;

 private:
  std::vector<Vec2> verts_;
  Vec2 centroid_;
};

}  // namespace manip
