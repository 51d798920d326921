#pragma once

#include <functional>

#include "manip/parallel.hpp"
#include "manip/particles.hpp"
#include "manip/rng.hpp"
#include "manip/se3.hpp"

namespace manip {

/// Gaussian belief over a pose. Covariance rows/cols are ordered
/// (xi_R [rad], xi_t [m]): indices 0..2 rotation, 3..5 translation.
struct PoseBelief {
  Pose mean;
  Mat6 cov = Mat6::Zero();

  PoseBelief() = default;
  PoseBelief(const Pose& mean_, const Mat6& cov_) : mean(mean_), cov(cov_) {}

  static PoseBelief exact(const Pose& mean_) { return PoseBelief(mean_, Mat6::Zero()); }

  Mat3 cov_rr() const { return cov.topLeftCorner<3, 3>(); }
  Mat3 cov_tt() const { return cov.bottomRightCorner<3, 3>(); }
};

/// (x, y, yaw) marginal of a belief expressed in a plane frame.
struct PlanarBelief {
  double x = 0.0, y = 0.0, theta = 0.0;  // m, m, rad in (-pi, pi]
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();  // ordered (x, y, theta)
};

/// 2D rigid state used by the planar grasp filter.
struct PlanarPose {
  double x = 0.0, y = 0.0, theta = 0.0;
};

using PoseParticles = ParticleSet<Pose>;
using PlanarParticles = ParticleSet<PlanarPose>;

// Validates symmetry (1e-12) and eigenvalue floor (-1e-12); clamps small
// negative eigenvalues to zero. Throws std::invalid_argument otherwise.
Mat6 require_psd(const Mat6& cov);
Eigen::MatrixXd require_psd_dynamic(const Eigen::MatrixXd& cov, double sym_tol = 1e-12,
                                    double eig_floor = -1e-12);

// Square root factor A with A*A^T = cov (eigenvalue based, PSD safe).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov);

// First-order covariance propagation through pose composition, with the mean
// composed exactly. Inputs must be PSD with rotation std <= 0.2 rad.
PoseBelief compose_beliefs(const PoseBelief& a, const PoseBelief& b);

PoseBelief invert_belief(const PoseBelief& a);

// Draws n poses: mean left-perturbed by a joint Gaussian in (xi_R, xi_t).
// Deterministic given the stream; particle i uses substream index i.
PoseParticles sample(const PoseBelief& b, std::size_t n, const RngStream& rng,
                     ExecMode mode = ExecMode::Parallel);

// Weighted Gaussian fit. Rotation mean is the iterated log-mean
// (threshold 1e-10, max 100 iterations); covariance is the weighted
// population covariance of the perturbations about the mean.
PoseBelief fit_gaussian(const PoseParticles& particles);

// Empirical belief from n draws of an arbitrary pose generator.
PoseBelief monte_carlo_covariance(const std::function<Pose(std::size_t)>& sampler, std::size_t n);

// Expresses b in the table frame and extracts the (x, y, yaw) marginal.
// The table z-axis is the plane normal.
PlanarBelief project_to_plane(const PoseBelief& b, const Pose& table);

// Planar counterparts used by the grasp stage.
PlanarParticles sample_planar(const PlanarBelief& b, std::size_t n, const RngStream& rng,
                              ExecMode mode = ExecMode::Parallel);
PlanarBelief fit_planar_gaussian(const PlanarParticles& particles);

}  // namespace manip
