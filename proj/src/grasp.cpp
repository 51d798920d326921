#include "manip/grasp.hpp"

#include <cmath>
#include <stdexcept>

namespace manip {

namespace {

constexpr double kFlushStopTol = 1e-9;  // rad per step
constexpr std::size_t kMaxSteps = 1000000;

struct JawState {
  double x, y, theta;
  double opening;
};

inline Vec2 rotate2(double theta, const Vec2& v) {
  const double c = std::cos(theta), s = std::sin(theta);
  return Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

// Rotate the pose by dtheta about the polygon's area centroid (world frame),
// then re-center the support interval on the jaw midline.
void rotate_and_center(JawState& st, const ConvexPolygon& poly, const Vec2& axis, double dtheta) {
  const Vec2 centroid_w = rotate2(st.theta, poly.centroid()) + Vec2(st.x, st.y);
  const Vec2 orbit = rotate2(dtheta, Vec2(st.x, st.y) - centroid_w);
  st.x = centroid_w.x() + orbit.x();
  st.y = centroid_w.y() + orbit.y();
  st.theta = wrap_angle(st.theta + dtheta);

  double lo, hi;
  poly.support_interval(st.x, st.y, st.theta, axis, lo, hi);
  const double shift = -0.5 * (lo + hi);
  st.x += shift * axis.x();
  st.y += shift * axis.y();
}

// Direction of decreasing support width at theta; 0 when theta is already a
// local minimum (flush contact on both sides).
int descent_direction(const ConvexPolygon& poly, const Vec2& axis, double theta) {
  const double h = 1e-7;
  const double w0 = poly.width(theta, axis);
  if (poly.width(theta + h, axis) < w0) return +1;
  if (poly.width(theta - h, axis) < w0) return -1;
  return 0;
}

// Nearest width minimum along dir from theta (golden-section refined).
double flush_angle(const ConvexPolygon& poly, const Vec2& axis, double theta, int dir) {
  const double coarse = M_PI / 180.0;
  double prev = 0.0, cur = coarse;
  double w_prev = poly.width(theta, axis);
  // Width is pi-periodic, so a minimum exists within a half turn.
  while (cur <= M_PI + coarse) {
    const double w_cur = poly.width(theta + dir * cur, axis);
    if (w_cur > w_prev) break;
    prev = cur;
    w_prev = w_cur;
    cur += coarse;
  }
  // Golden-section minimization on [prev - coarse, cur] (clamped at 0).
  double a = std::max(prev - coarse, 0.0), b = cur;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = poly.width(theta + dir * c1, axis), f2 = poly.width(theta + dir * c2, axis);
  for (int it = 0; it < 90 && (b - a) > 1e-14; ++it) {
    if (f1 <= f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = poly.width(theta + dir * c1, axis);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = poly.width(theta + dir * c2, axis);
    }
  }
  return theta + dir * 0.5 * (a + b);
}

// Solve width(theta + dir*d) == target for d in (0, d_max]; width decreases
// monotonically toward the flush angle. Newton with bisection safeguard.
double solve_rotation(const ConvexPolygon& poly, const Vec2& axis, double theta, int dir,
                      double d_max, double target) {
  double lo = 0.0, hi = d_max;
  double d = std::min(d_max, 1e-3);
  for (int it = 0; it < 100; ++it) {
    const double w = poly.width(theta + dir * d, axis);
    const double g = w - target;
    if (std::abs(g) < 1e-13) return d;
    if (g > 0.0)
      lo = d;
    else
      hi = d;
    const double slope = dir * poly.width_derivative(theta + dir * d, axis);
    double d_next = (std::abs(slope) > 1e-12) ? d - g / slope : 0.5 * (lo + hi);
    if (!(d_next > lo) || !(d_next < hi)) d_next = 0.5 * (lo + hi);
    d = d_next;
  }
  return d;
}

}  // namespace

GraspOutcome simulate_grasp(const PlanarPose& x0, const ConvexPolygon& poly, const GraspParams& g,
                            std::vector<GraspTraceRow>* trace) {
  if (!(g.closing_step > 0.0) || g.closing_step > 1e-3)
    throw std::invalid_argument("simulate_grasp: closing_step must be in (0, 1e-3]");
  if (!(g.max_opening > 0.0)) throw std::invalid_argument("simulate_grasp: max_opening must be positive");
  const double axis_norm = g.closing_axis.norm();
  if (!(axis_norm > 0.0)) throw std::invalid_argument("simulate_grasp: zero closing axis");
  const Vec2 axis = g.closing_axis / axis_norm;

  JawState st{x0.x, x0.y, wrap_angle(x0.theta), g.max_opening};
  const double delta = g.closing_step;

  double lo, hi;
  poly.support_interval(st.x, st.y, st.theta, axis, lo, hi);
  const double w0 = hi - lo;
  if (w0 > g.max_opening + g.force_limit_proxy)
    throw GraspError("simulate_grasp: polygon wider than max opening");
  if (hi > 0.5 * g.max_opening + g.force_limit_proxy || lo < -0.5 * g.max_opening - g.force_limit_proxy)
    throw GraspError("simulate_grasp: polygon does not fit between the open jaws");

  std::size_t steps = 0;
  auto record = [&]() {
    if (trace != nullptr)
      trace->push_back({PlanarPose{st.x, st.y, st.theta}, st.opening, poly.width(st.theta, axis)});
  };
  record();

  // Approach: jaws close freely until one touches, then push the polygon
  // toward the midline until contact on both sides. Orientation is unchanged;
  // these phases collapse to one translation along the closing axis.
  {
    const double s_contact = 2.0 * std::max(hi, -lo);
    const double push = 0.5 * (s_contact - w0);
    const std::size_t n_free = static_cast<std::size_t>(
        std::ceil(std::max(st.opening - s_contact, 0.0) / delta));
    const std::size_t n_push = static_cast<std::size_t>(std::ceil(std::max(push, 0.0) * 2.0 / delta));
    const double sign = (hi > -lo) ? -1.0 : 1.0;  // pushed away from the first-contact jaw
    st.x += sign * push * axis.x();
    st.y += sign * push * axis.y();
    steps += n_free + n_push;
    st.opening = std::max(st.opening - static_cast<double>(n_free + n_push) * delta, w0);
    record();
  }

  // Squeeze: per closing increment, rotate down the width gradient just
  // enough to fit, keeping the support interval centered between the jaws.
  const int dir = descent_direction(poly, axis, st.theta);
  double theta_f = st.theta;
  if (dir != 0) theta_f = flush_angle(poly, axis, st.theta, dir);
  const double w_flush = poly.width(theta_f, axis);

  while (true) {
    if (steps > kMaxSteps) throw GraspError("simulate_grasp: did not converge");
    const double s_next = st.opening - delta;
    if (w_flush >= s_next) {
      // Jaws stall at the flush width; finish the rotation and stop.
      rotate_and_center(st, poly, axis, wrap_angle(theta_f - st.theta));
      st.opening = w_flush;
      ++steps;
      record();
      break;
    }
    const double d_left = std::abs(wrap_angle(theta_f - st.theta));
    if (d_left < kFlushStopTol) {
      st.opening = w_flush;
      break;
    }
    const double d = solve_rotation(poly, axis, st.theta, dir, d_left, s_next);
    rotate_and_center(st, poly, axis, dir * d);
    st.opening = s_next;
    ++steps;
    record();
  }

  GraspOutcome out;
  out.final_pose = PlanarPose{st.x, st.y, wrap_angle(st.theta)};
  out.width = poly.width(st.theta, axis);
  out.steps = steps;
  return out;
}

double width_likelihood(double y, double d_sim, double sigma_d) {
  if (!(sigma_d > 0.0)) throw std::invalid_argument("width_likelihood: sigma_d must be positive");
  const double r = (y - d_sim) / sigma_d;
  return std::exp(-0.5 * r * r);
}

PlanarParticles grasp_update(const PlanarParticles& prior, const ConvexPolygon& poly,
                             const GraspParams& g, double y, const RngStream& rng, ExecMode mode) {
  const std::size_t n = prior.size();
  if (n == 0) throw std::invalid_argument("grasp_update: empty prior");

  std::vector<GraspOutcome> outcomes(n);
  std::vector<std::string> errors(n);
  parallel_for(n, mode, [&](std::size_t i) {
    try {
      outcomes[i] = simulate_grasp(prior.particles[i].state, poly, g);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw GraspError(e);

  PlanarParticles post;
  post.generation = prior.generation + 1;
  post.particles.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    post.particles[i].state = outcomes[i].final_pose;
    post.particles[i].weight =
        prior.particles[i].weight * width_likelihood(y, outcomes[i].width, g.sigma_d);
  }
  post.normalize();
  if (effective_sample_size(post) < 0.5 * static_cast<double>(n))
    post = systematic_resample(post, rng);
  return post;
}

}  // namespace manip
