#include "manip/belief.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace manip {

namespace {

constexpr double kMaxRotStd = 0.2;  // first-order validity bound, rad

void check_rotation_spread(const PoseBelief& b, const char* who) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(b.cov_rr());
  const double max_eig = es.eigenvalues().maxCoeff();
  if (std::sqrt(std::max(max_eig, 0.0)) > kMaxRotStd)
    throw std::invalid_argument(std::string(who) + ": rotation std exceeds first-order bound");
}

Mat6 symmetrize(const Mat6& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Eigen::MatrixXd require_psd_dynamic(const Eigen::MatrixXd& cov, double sym_tol, double eig_floor) {
  if (cov.rows() != cov.cols()) throw std::invalid_argument("require_psd: not square");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > sym_tol)
    throw std::invalid_argument("require_psd: not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
  Eigen::VectorXd eig = es.eigenvalues();
  if (eig.minCoeff() < eig_floor)
    throw std::invalid_argument("require_psd: negative eigenvalue " + std::to_string(eig.minCoeff()));
  for (int i = 0; i < eig.size(); ++i) eig(i) = std::max(eig(i), 0.0);
  return es.eigenvectors() * eig.asDiagonal() * es.eigenvectors().transpose();
}

Mat6 require_psd(const Mat6& cov) { return require_psd_dynamic(cov); }

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
  Eigen::VectorXd eig = es.eigenvalues();
  for (int i = 0; i < eig.size(); ++i) eig(i) = std::sqrt(std::max(eig(i), 0.0));
  return es.eigenvectors() * eig.asDiagonal();
}

PoseBelief compose_beliefs(const PoseBelief& a, const PoseBelief& b) {
  const Mat6 ca = require_psd(a.cov);
  const Mat6 cb = require_psd(b.cov);
  check_rotation_spread(a, "compose_beliefs");
  check_rotation_spread(b, "compose_beliefs");

  Mat6 ja = Mat6::Identity();
  ja.bottomLeftCorner<3, 3>() = -hat(a.mean.r * b.mean.t);
  Mat6 jb = Mat6::Zero();
  jb.topLeftCorner<3, 3>() = a.mean.r;
  jb.bottomRightCorner<3, 3>() = a.mean.r;

  PoseBelief out;
  out.mean = renormalized(compose(a.mean, b.mean));
  out.cov = require_psd(symmetrize(ja * ca * ja.transpose() + jb * cb * jb.transpose()));
  return out;
}

PoseBelief invert_belief(const PoseBelief& a) {
  const Mat6 ca = require_psd(a.cov);
  check_rotation_spread(a, "invert_belief");

  const Mat3 rt = a.mean.r.transpose();
  Mat6 j = Mat6::Zero();
  j.topLeftCorner<3, 3>() = -rt;
  j.bottomLeftCorner<3, 3>() = -hat(rt * a.mean.t) * rt;
  j.bottomRightCorner<3, 3>() = -rt;

  PoseBelief out;
  out.mean = invert(a.mean);
  out.cov = require_psd(symmetrize(j * ca * j.transpose()));
  return out;
}

PoseParticles sample(const PoseBelief& b, std::size_t n, const RngStream& rng, ExecMode mode) {
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
  const Mat6 cov = require_psd(b.cov);
  const Eigen::MatrixXd a = psd_sqrt(cov);

  std::vector<Pose> poses(n);
  parallel_for(n, mode, [&](std::size_t i) {
    auto eng = rng.at(i);
    Vec6 z;
    for (int k = 0; k < 6; ++k) z(k) = gauss(eng);
    const Vec6 xi = a * z;
    poses[i] = Pose(exp_so3(xi.head<3>()) * b.mean.r, b.mean.t + xi.tail<3>());
  });
  return PoseParticles::uniform(std::move(poses));
}

PoseBelief fit_gaussian(const PoseParticles& particles) {
  const std::size_t n = particles.size();
  if (n < 2) throw std::invalid_argument("fit_gaussian: need at least 2 particles");
  const double total = particles.total_weight();
  if (!(total > 0.0)) throw std::invalid_argument("fit_gaussian: zero total weight");

  // Weighted translation mean.
  Vec3 t_mean = Vec3::Zero();
  for (const auto& p : particles.particles) t_mean += (p.weight / total) * p.state.t;

  // Iterated intrinsic rotation mean.
  Mat3 r_mean = particles.particles.front().state.r;
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    Vec3 xi = Vec3::Zero();
    for (const auto& p : particles.particles)
      xi += (p.weight / total) * log_so3(p.state.r * r_mean.transpose());
    r_mean = project_rotation(exp_so3(xi) * r_mean);
    if (xi.norm() < 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged) throw std::runtime_error("fit_gaussian: rotation mean did not converge");

  Mat6 cov = Mat6::Zero();
  for (const auto& p : particles.particles) {
    Vec6 xi;
    xi.head<3>() = log_so3(p.state.r * r_mean.transpose());
    xi.tail<3>() = p.state.t - t_mean;
    cov += (p.weight / total) * (xi * xi.transpose());
  }
  return PoseBelief(Pose(r_mean, t_mean), require_psd(symmetrize(cov)));
}

PoseBelief monte_carlo_covariance(const std::function<Pose(std::size_t)>& sampler, std::size_t n) {
  if (n < 2) throw std::invalid_argument("monte_carlo_covariance: need n >= 2");
  std::vector<Pose> poses;
  poses.reserve(n);
  for (std::size_t i = 0; i < n; ++i) poses.push_back(sampler(i));
  return fit_gaussian(PoseParticles::uniform(std::move(poses)));
}

PlanarBelief project_to_plane(const PoseBelief& b, const Pose& table) {
  const Mat6 cov = require_psd(b.cov);

  // Belief of the object expressed in the table frame: exact inverse table
  // pose composed with b; only the rotation congruence acts on the covariance.
  const Pose mean_t = compose(invert(table), b.mean);
  Mat6 rr = Mat6::Zero();
  rr.topLeftCorner<3, 3>() = table.r.transpose();
  rr.bottomRightCorner<3, 3>() = table.r.transpose();
  const Mat6 cov_table = rr * cov * rr.transpose();

  PlanarBelief out;
  out.x = mean_t.t.x();
  out.y = mean_t.t.y();
  out.theta = wrap_angle(std::atan2(mean_t.r(1, 0), mean_t.r(0, 0)));
  // Rows/cols (xi_t.x, xi_t.y, xi_R.z) -> (x, y, theta).
  const int idx[3] = {3, 4, 2};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.cov(i, j) = cov_table(idx[i], idx[j]);
  return out;
}

PlanarParticles sample_planar(const PlanarBelief& b, std::size_t n, const RngStream& rng,
                              ExecMode mode) {
  if (n == 0) throw std::invalid_argument("sample_planar: n must be >= 1");
  const Eigen::MatrixXd a = psd_sqrt(require_psd_dynamic(b.cov));
  std::vector<PlanarPose> states(n);
  parallel_for(n, mode, [&](std::size_t i) {
    auto eng = rng.at(i);
    Eigen::Vector3d z(gauss(eng), gauss(eng), gauss(eng));
    const Eigen::Vector3d xi = a * z;
    states[i] = PlanarPose{b.x + xi(0), b.y + xi(1), wrap_angle(b.theta + xi(2))};
  });
  return PlanarParticles::uniform(std::move(states));
}

PlanarBelief fit_planar_gaussian(const PlanarParticles& particles) {
  const std::size_t n = particles.size();
  if (n < 2) throw std::invalid_argument("fit_planar_gaussian: need at least 2 particles");
  const double total = particles.total_weight();
  if (!(total > 0.0)) throw std::invalid_argument("fit_planar_gaussian: zero total weight");

  double x = 0.0, y = 0.0;
  for (const auto& p : particles.particles) {
    x += (p.weight / total) * p.state.x;
    y += (p.weight / total) * p.state.y;
  }
  // Wrap-aware angular mean.
  double theta = particles.particles.front().state.theta;
  for (int iter = 0; iter < 100; ++iter) {
    double delta = 0.0;
    for (const auto& p : particles.particles)
      delta += (p.weight / total) * wrap_angle(p.state.theta - theta);
    theta = wrap_angle(theta + delta);
    if (std::abs(delta) < 1e-12) break;
  }

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : particles.particles) {
    Eigen::Vector3d d(p.state.x - x, p.state.y - y, wrap_angle(p.state.theta - theta));
    cov += (p.weight / total) * (d * d.transpose());
  }
  PlanarBelief out;
  out.x = x;
  out.y = y;
  out.theta = theta;
  out.cov = 0.5 * (cov + cov.transpose());
  return out;
}

}  // namespace manip
