#include "manip/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <array>
#include <map>
#include <stdexcept>

namespace manip {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

  const double denom = 1.0 / (va + vb + vc);
  return a + (vb * denom) * ab + (vc * denom) * ac;
}

ShapeModel::ShapeModel(std::vector<Triangle> triangles) : tris_(std::move(triangles)) {
  if (tris_.size() < 4) throw std::invalid_argument("ShapeModel: need at least 4 triangles");

  Vec3 centroid = Vec3::Zero();
  for (auto& t : tris_) centroid += (t.a + t.b + t.c) / 3.0;
  centroid /= static_cast<double>(tris_.size());

  // Recompute unit normals from the winding; require them to face away from
  // the centroid (convex, outward).
  using VertexKey = std::array<long long, 3>;
  auto key = [](const Vec3& v) {
    return VertexKey{std::llround(v.x() * 1e9), std::llround(v.y() * 1e9),
                     std::llround(v.z() * 1e9)};
  };
  std::map<std::pair<VertexKey, VertexKey>, int> edge_use;
  auto count_edge = [&](const Vec3& a, const Vec3& b) {
    VertexKey ka = key(a), kb = key(b);
    if (kb < ka) std::swap(ka, kb);
    edge_use[{ka, kb}]++;
  };
  for (auto& t : tris_) {
    Vec3 n = (t.b - t.a).cross(t.c - t.a);
    const double len = n.norm();
    if (!(len > 0.0)) throw std::invalid_argument("ShapeModel: degenerate triangle");
    n /= len;
    if (n.dot((t.a + t.b + t.c) / 3.0 - centroid) <= 0.0)
      throw std::invalid_argument("ShapeModel: inward-facing triangle");
    t.normal = n;
    count_edge(t.a, t.b);
    count_edge(t.b, t.c);
    count_edge(t.c, t.a);
  }
  for (const auto& [e, uses] : edge_use)
    if (uses != 2) throw std::invalid_argument("ShapeModel: mesh is not watertight");
}

ShapeModel ShapeModel::box(double sx, double sy, double sz) {
  if (!(sx > 0.0) || !(sy > 0.0) || !(sz > 0.0))
    throw std::invalid_argument("ShapeModel::box: sides must be positive");
  const double x = 0.5 * sx, y = 0.5 * sy, z = 0.5 * sz;
  const Vec3 v[8] = {{-x, -y, -z}, {x, -y, -z}, {x, y, -z}, {-x, y, -z},
                     {-x, -y, z},  {x, -y, z},  {x, y, z},  {-x, y, z}};
  auto quad = [&](int a, int b, int c, int d, std::vector<Triangle>& out) {
    out.push_back({v[a], v[b], v[c], Vec3::Zero()});
    out.push_back({v[a], v[c], v[d], Vec3::Zero()});
  };
  std::vector<Triangle> tris;
  quad(0, 3, 2, 1, tris);  // -z
  quad(4, 5, 6, 7, tris);  // +z
  quad(0, 1, 5, 4, tris);  // -y
  quad(2, 3, 7, 6, tris);  // +y
  quad(1, 2, 6, 5, tris);  // +x
  quad(0, 4, 7, 3, tris);  // -x
  return ShapeModel(std::move(tris));
}

void ShapeModel::surface_distance(const Pose& pose, const Vec3& p, double& dist,
                                  Vec3& normal) const {
  // Work in the object frame; one rotation brings the normal back out.
  const Vec3 q = pose.r.transpose() * (p - pose.t);
  double best = std::numeric_limits<double>::infinity();
  const Triangle* best_tri = nullptr;
  for (const auto& t : tris_) {
    const Vec3 cp = closest_point_on_triangle(q, t.a, t.b, t.c);
    const double d2 = (q - cp).squaredNorm();
    if (d2 < best) {
      best = d2;
      best_tri = &t;
    }
  }
  dist = std::sqrt(best);
  normal = pose.r * best_tri->normal;
}

std::optional<std::pair<Vec3, Vec3>> ShapeModel::raycast(const Pose& pose, const Vec3& origin,
                                                         const Vec3& dir) const {
  const Vec3 o = pose.r.transpose() * (origin - pose.t);
  const Vec3 d = pose.r.transpose() * dir;
  double best_t = std::numeric_limits<double>::infinity();
  const Triangle* best_tri = nullptr;
  for (const auto& tri : tris_) {
    // Moller-Trumbore.
    const Vec3 e1 = tri.b - tri.a, e2 = tri.c - tri.a;
    const Vec3 h = d.cross(e2);
    const double det = e1.dot(h);
    if (std::abs(det) < 1e-14) continue;
    const double inv = 1.0 / det;
    const Vec3 s = o - tri.a;
    const double u = inv * s.dot(h);
    if (u < -1e-12 || u > 1.0 + 1e-12) continue;
    const Vec3 qv = s.cross(e1);
    const double v = inv * d.dot(qv);
    if (v < -1e-12 || u + v > 1.0 + 1e-12) continue;
    const double t = inv * e2.dot(qv);
    if (t >= 0.0 && t < best_t) {
      best_t = t;
      best_tri = &tri;
    }
  }
  if (best_tri == nullptr) return std::nullopt;
  return std::make_pair(origin + best_t * dir, pose.r * best_tri->normal);
}

}  // namespace manip
