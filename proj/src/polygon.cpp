#include "manip/polygon.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace manip {

namespace {

inline Vec2 rotate2(double theta, const Vec2& v) {
  const double c = std::cos(theta), s = std::sin(theta);
  return Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

inline Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : verts_(std::move(vertices)) {
  const std::size_t n = verts_.size();
  if (n < 3) throw std::invalid_argument("ConvexPolygon: need >= 3 vertices");
  for (const auto& v : verts_)
    if (!v.allFinite()) throw std::invalid_argument("ConvexPolygon: non-finite vertex");
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = verts_[i];
    const Vec2& b = verts_[(i + 1) % n];
    const Vec2& c = verts_[(i + 2) % n];
    const double cross = (b.x() - a.x()) * (c.y() - b.y()) - (b.y() - a.y()) * (c.x() - b.x());
    if (cross <= 0.0) throw std::invalid_argument("ConvexPolygon: vertices must be strictly convex CCW");
  }
  // Area centroid (shoelace).
  double area2 = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = verts_[i];
    const Vec2& q = verts_[(i + 1) % n];
    const double w = p.x() * q.y() - q.x() * p.y();
    area2 += w;
    c += w * (p + q);
  }
  centroid_ = c / (3.0 * area2);
}

ConvexPolygon ConvexPolygon::rectangle(double size_x, double size_y) {
  if (!(size_x > 0.0) || !(size_y > 0.0))
    throw std::invalid_argument("ConvexPolygon::rectangle: sides must be positive");
  const double hx = 0.5 * size_x, hy = 0.5 * size_y;
  return ConvexPolygon({Vec2(hx, hy), Vec2(-hx, hy), Vec2(-hx, -hy), Vec2(hx, -hy)});
}

void ConvexPolygon::support_interval(double x, double y, double theta, const Vec2& axis,
                                     double& lo, double& hi) const {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  const Vec2 p(x, y);
  for (const auto& v : verts_) {
    const double m = axis.dot(rotate2(theta, v) + p);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
}

double ConvexPolygon::width(double theta, const Vec2& axis) const {
  double lo, hi;
  support_interval(0.0, 0.0, theta, axis, lo, hi);
  return hi - lo;
}

double ConvexPolygon::width_derivative(double theta, const Vec2& axis) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  Vec2 v_hi = Vec2::Zero(), v_lo = Vec2::Zero();
  for (const auto& v : verts_) {
    const Vec2 rv = rotate2(theta, v);
    const double m = axis.dot(rv);
    if (m > hi) {
      hi = m;
      v_hi = rv;
    }
    if (m < lo) {
      lo = m;
      v_lo = rv;
    }
  }
  // d/dtheta axis . R(theta) v = axis . perp(R(theta) v)
  return axis.dot(perp(v_hi)) - axis.dot(perp(v_lo));
}

}  // namespace manip
