#pragma once

#include <string>
#include <vector>

#include "manip/belief.hpp"
#include "manip/parallel.hpp"
#include "manip/rng.hpp"
#include "manip/shape.hpp"

namespace manip {

struct TouchMeasurement {
  Vec3 pos;  // contact position, robot base frame, m
  Vec3 nor;  // unit contact normal
};

struct ScalingSeriesParams {
  int m_per_round = 50;       // samples drawn per surviving neighborhood
  double zoom = 0.5;          // neighborhood shrink factor per round, in (0,1)
  double delta_init_pos = 0.01;     // m
  double delta_init_rot = 0.17453;  // rad
  double delta_final_pos = 5e-4;    // m
  double delta_final_rot = 8.7e-3;  // rad
  double sigma_pos = 5e-4;    // m
  double sigma_nor = 8.7e-2;  // rad
  int max_centers = 200;      // survivors kept per round (top weights)
  bool plane_constraint = false;  // restrict to (x, y, yaw) in table frame
  Pose table;                     // used when plane_constraint is set
};

struct TouchDivergence : std::runtime_error {
  TouchDivergence() : std::runtime_error("scaling series: all candidates pruned") {}
};

/// exp(-0.5 d^2/sigma_pos^2 - 0.5 alpha^2/sigma_nor^2) where d is the surface
/// distance of the measured point and alpha the angle between the measured
/// normal and the nearest-point surface normal.
double proximity_likelihood(const TouchMeasurement& y, const Pose& x, const ShapeModel& s,
                            double sigma_pos, double sigma_nor);

/// Annealed neighborhood search: per round, draw m poses uniformly in each
/// delta-neighborhood, weight with tempered sigmas (sigma * delta/delta_final),
/// keep candidates above 1% of the round maximum, shrink delta by zoom.
/// Rounds = ceil(log(delta_final/delta_init)/log(zoom)).
ParticleSet<Pose> scaling_series(const PoseBelief& prior, const std::vector<TouchMeasurement>& meas,
                                 const ShapeModel& s, const ScalingSeriesParams& params,
                                 const RngStream& rng, ExecMode mode = ExecMode::Parallel);

int scaling_series_rounds(const ScalingSeriesParams& params);

/// CSV with six columns px,py,pz,nx,ny,nz (SI units).
std::vector<TouchMeasurement> load_touch_csv(const std::string& path);
void save_touch_csv(const std::string& path, const std::vector<TouchMeasurement>& meas);

}  // namespace manip
