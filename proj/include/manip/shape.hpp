#pragma once

#include <optional>
#include <vector>

#include "manip/se3.hpp"

namespace manip {

/// Watertight convex triangle mesh with outward normals, object frame.
class ShapeModel {
 public:
  struct Triangle {
    Vec3 a, b, c;
    Vec3 normal;  // outward unit normal
  };

  explicit ShapeModel(std::vector<Triangle> triangles);

  /// Axis-aligned box spanning [-sx/2, sx/2] x [-sy/2, sy/2] x [-sz/2, sz/2].
  static ShapeModel box(double sx, double sy, double sz);

  const std::vector<Triangle>& triangles() const { return tris_; }

  /// Unsigned distance from p (query frame = frame of `pose`) to the surface
  /// of the shape placed at `pose`, plus the outward normal at the nearest
  /// surface point.
  void surface_distance(const Pose& pose, const Vec3& p, double& dist, Vec3& normal) const;

  /// First intersection of the ray origin + t*dir (t >= 0) with the surface.
  std::optional<std::pair<Vec3, Vec3>> raycast(const Pose& pose, const Vec3& origin,
                                               const Vec3& dir) const;

 private:
  std::vector<Triangle> tris_;
};

/// Closest point on triangle abc to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace manip
