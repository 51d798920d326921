#pragma once

#include <string>
#include <vector>

#include "manip/parallel.hpp"
#include "manip/rng.hpp"
#include "manip/se3.hpp"

namespace manip {

/// Ordered waypoint offsets in the hole-surface plane (meters, relative to
/// the believed insertion point). `pitch` bounds the spacing of consecutive
/// waypoints; `bound` is the search extent (radius in meters for the circular
/// pattern, sigma multiples for the covariance-shaped one).
struct SpiralPlan {
  std::vector<Vec2> waypoints;
  double pitch = 0.0;
  double bound = 0.0;
  bool bound_in_sigma = false;
};

struct RotationSweepPlan {
  std::vector<double> angles;  // rad, ordered by |angle| ascending
  double step = 0.0;
  double bound = 0.0;
};

struct SearchCost {
  double mean_steps = 0.0;
  double std_steps = 0.0;
  double success_rate = 0.0;
};

/// Spacing that guarantees every point of the searched region lies within
/// tol of a waypoint (ring gap == chord cap == sqrt(2)*tol, minus margin).
double pitch_for_tol(double tol);

/// Archimedean spiral r = (pitch/2pi) * phi, consecutive waypoints at most
/// pitch apart, extended half a pitch past r_max so the rim stays covered.
SpiralPlan circular_spiral(double pitch, double r_max);

/// Covariance-shaped search: a covering lattice aligned with the eigenvectors
/// of cov_xy, visited in order of Mahalanobis distance (annulus by annulus,
/// swept by angle). Matches the iso-density contours of the belief, so
/// expected steps scale with sigma_major*sigma_minor rather than
/// sigma_major^2. A zero eigenvalue degenerates to a 1-D line search along
/// the major axis.
SpiralPlan elliptical_spiral(const Mat2& cov_xy, double tol, double n_sigma);

/// Angles 0, +step, -step, +2 step, ... out to +-k*sigma_theta, nearest
/// first.
RotationSweepPlan rotation_sweep(double sigma_theta, double k, double step);

/// Monte Carlo cost of a plan: holes drawn from N(0, true_cov); steps counted
/// until a waypoint lands within tol. Mean/std are over the found holes.
SearchCost expected_search_cost(const SpiralPlan& plan, const Mat2& true_cov, double tol,
                                std::size_t n_mc, const RngStream& rng,
                                ExecMode mode = ExecMode::Parallel);

void save_plan_csv(const std::string& path, const SpiralPlan& plan);

/// Waypoints overlaid on the 1/2/3-sigma ellipses of cov_xy.
void save_plan_svg(const std::string& path, const SpiralPlan& plan, const Mat2& cov_xy);

}  // namespace manip
