#pragma once

#include "manip/belief.hpp"
#include "manip/parallel.hpp"
#include "manip/particles.hpp"
#include "manip/polygon.hpp"
#include "manip/rng.hpp"

namespace manip {

struct GraspError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraspParams {
  Vec2 closing_axis = Vec2(0.0, 1.0);  // unit, gripper frame
  double max_opening = 0.085;          // m
  double closing_step = 1e-4;          // m of opening per step, in (0, 1e-3]
  double sigma_d = 3e-4;               // encoder noise std, m
  double force_limit_proxy = 1e-9;     // penetration tolerance, m
};

struct GraspOutcome {
  PlanarPose final_pose;  // object in gripper frame
  double width = 0.0;     // post-grasp finger distance, m
  std::size_t steps = 0;
};

struct GraspTraceRow {
  PlanarPose pose;
  double opening = 0.0;
  double width = 0.0;
};

/// Deterministic quasi-static closure of symmetric parallel jaws around a
/// convex polygon. The jaws transmit only normal forces; the object slides to
/// stay between them and, once squeezed on both sides, rotates about its area
/// centroid down the support-width gradient until a width minimum (flush
/// contact) is reached. The tangential coordinate of the centroid is
/// preserved throughout. `trace`, when given, receives one row per state
/// change.
GraspOutcome simulate_grasp(const PlanarPose& x0, const ConvexPolygon& poly, const GraspParams& g,
                            std::vector<GraspTraceRow>* trace = nullptr);

/// Measurement weight exp(-0.5 (y - d_sim)^2 / sigma_d^2); the normalizer is
/// left to the filter's normalization step.
double width_likelihood(double y, double d_sim, double sigma_d);

/// Full grasp update: forward-simulates every particle, weights by the
/// encoder measurement y, normalizes, and resamples when ESS < n/2. The
/// forward simulation is the data-parallel kernel.
PlanarParticles grasp_update(const PlanarParticles& prior, const ConvexPolygon& poly,
                             const GraspParams& g, double y, const RngStream& rng,
                             ExecMode mode = ExecMode::Parallel);

}  // namespace manip
