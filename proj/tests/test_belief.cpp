#include <doctest.h>

#include <random>

#include "manip/belief.hpp"
#include "oracles.hpp"

using namespace manip;

namespace {

Mat6 diag_cov(double rot_sigma, double trans_sigma) {
  Mat6 c = Mat6::Zero();
  c.topLeftCorner<3, 3>() = rot_sigma * rot_sigma * Mat3::Identity();
  c.bottomRightCorner<3, 3>() = trans_sigma * trans_sigma * Mat3::Identity();
  return c;
}

PoseBelief random_belief(std::mt19937_64& eng, double rot_sigma, double trans_sigma) {
  std::normal_distribution<double> n01;
  Vec3 axis(n01(eng), n01(eng), n01(eng));
  axis.normalize();
  PoseBelief b;
  b.mean = Pose(exp_so3(1.2 * axis), Vec3(n01(eng), n01(eng), n01(eng)));
  // Random SPD covariance with the requested scale.
  Eigen::Matrix<double, 6, 6> a;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = n01(eng);
  Mat6 spd = a * a.transpose() / 6.0;
  Mat6 scale = Mat6::Identity();
  scale.topLeftCorner<3, 3>() *= rot_sigma;
  scale.bottomRightCorner<3, 3>() *= trans_sigma;
  b.cov = scale * spd * scale;
  return b;
}

// Monte Carlo covariance of compose(a_draw, b_draw) built from test-side
// sampling only.
Mat6 mc_compose_cov(const PoseBelief& a, const PoseBelief& b, int n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  const Eigen::MatrixXd la = oracle::chol_of(a.cov), lb = oracle::chol_of(b.cov);
  const Pose mean = compose(a.mean, b.mean);
  std::vector<Pose> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i)
    out.push_back(compose(oracle::perturb(a.mean, la, eng), oracle::perturb(b.mean, lb, eng)));
  return oracle::empirical_cov(out, mean);
}

Mat6 mc_invert_cov(const PoseBelief& a, int n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  const Eigen::MatrixXd la = oracle::chol_of(a.cov);
  const Pose mean = invert(a.mean);
  std::vector<Pose> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(invert(oracle::perturb(a.mean, la, eng)));
  return oracle::empirical_cov(out, mean);
}

}  // namespace

TEST_CASE("compose_beliefs: exact inputs stay exact") {
  std::mt19937_64 eng(3);
  PoseBelief a = random_belief(eng, 0.0, 0.0);
  PoseBelief b = random_belief(eng, 0.0, 0.0);
  a.cov.setZero();
  b.cov.setZero();
  const PoseBelief c = compose_beliefs(a, b);
  const Pose expect = compose(a.mean, b.mean);
  CHECK((c.mean.r - expect.r).norm() < 1e-12);
  CHECK((c.mean.t - expect.t).norm() < 1e-12);
  CHECK(c.cov.norm() == 0.0);
}

TEST_CASE("compose_beliefs: identity-mean a with zero-translation b keeps cov") {
  PoseBelief a;
  a.cov = diag_cov(0.0, 0.01);
  PoseBelief b;
  b.mean = Pose(rot_z(0.7), Vec3::Zero());  // t_b = 0 so J_a = I
  const PoseBelief c = compose_beliefs(a, b);
  CHECK((c.cov - a.cov).norm() < 1e-15);
}

TEST_CASE("compose_beliefs matches Monte Carlo") {
  PoseBelief a;
  a.mean = Pose(rot_z(0.4), Vec3(0.2, -0.1, 0.05));
  a.cov = diag_cov(0.05, 0.002);
  PoseBelief b;
  b.mean = Pose(rot_z(-0.9), Vec3(0.1, 0.0, 0.0));
  b.cov = diag_cov(0.03, 0.001);

  const PoseBelief c = compose_beliefs(a, b);
  const Mat6 mc = mc_compose_cov(a, b, 100000, 42);
  CHECK(oracle::rel_frobenius(c.cov, mc) < 0.05);
}

TEST_CASE("invert_belief: exact and diagonal cases") {
  std::mt19937_64 eng(5);
  PoseBelief a = random_belief(eng, 0.0, 0.0);
  a.cov.setZero();
  const PoseBelief inv = invert_belief(a);
  const Pose expect = invert(a.mean);
  CHECK((inv.mean.r - expect.r).norm() < 1e-12);
  CHECK(inv.cov.norm() == 0.0);

  // Identity mean: the Jacobian is a sign-flipped block rotation, so the
  // eigenvalues survive.
  PoseBelief b;
  b.cov = diag_cov(0.02, 0.003);
  const PoseBelief binv = invert_belief(b);
  Eigen::SelfAdjointEigenSolver<Mat6> e1(b.cov), e2(binv.cov);
  CHECK((e1.eigenvalues() - e2.eigenvalues()).norm() < 1e-15);
}

TEST_CASE("invert_belief matches Monte Carlo") {
  PoseBelief a;
  a.mean = Pose(exp_so3(Vec3(0.3, -0.2, 0.5)), Vec3(0.3, 0.2, -0.4));
  a.cov = diag_cov(0.04, 0.003);
  a.cov(0, 4) = a.cov(4, 0) = 2e-5;  // some cross correlation

  const PoseBelief inv = invert_belief(a);
  const Mat6 mc = mc_invert_cov(a, 100000, 99);
  CHECK(oracle::rel_frobenius(inv.cov, mc) < 0.05);

  const PoseBelief round = compose_beliefs(a, inv);
  CHECK((round.mean.r - Mat3::Identity()).norm() < 1e-9);
  CHECK(round.mean.t.norm() < 1e-9);
}

TEST_CASE("first-order error shrinks with the covariance") {
  const Pose mean_a(rot_z(0.5), Vec3(0.1, 0.2, 0.0));
  const Pose mean_b(rot_z(0.3), Vec3(0.15, -0.05, 0.1));
  const Mat6 base_a = diag_cov(0.19, 0.004);
  const Mat6 base_b = diag_cov(0.15, 0.002);

  // Common random numbers across scales plus a control variate: the analytic
  // propagation is fed the empirical input covariance of the very same
  // draws, so input sampling noise cancels and the residual is the
  // first-order truncation, which shrinks with the covariance.
  double prev = 1e9;
  for (double s : {1.0, 0.25, 0.0625}) {
    std::mt19937_64 eng(1234);
    const Eigen::MatrixXd la = oracle::chol_of(s * base_a);
    const Eigen::MatrixXd lb = oracle::chol_of(s * base_b);
    const int n = 150000;
    std::vector<Pose> draws_a, draws_b, outs;
    draws_a.reserve(n);
    draws_b.reserve(n);
    outs.reserve(n);
    for (int i = 0; i < n; ++i) {
      draws_a.push_back(oracle::perturb(mean_a, la, eng));
      draws_b.push_back(oracle::perturb(mean_b, lb, eng));
      outs.push_back(compose(draws_a.back(), draws_b.back()));
    }
    PoseBelief a(mean_a, oracle::empirical_cov(draws_a, mean_a));
    PoseBelief b(mean_b, oracle::empirical_cov(draws_b, mean_b));
    const PoseBelief c = compose_beliefs(a, b);
    const Mat6 mc = oracle::empirical_cov(outs, c.mean);
    const double err = oracle::rel_frobenius(c.cov, mc);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("sample: determinism and moments") {
  PoseBelief b;
  b.mean = Pose(rot_z(0.3), Vec3(0.1, 0.0, -0.2));

  SUBCASE("zero covariance clones the mean") {
    const auto set = sample(b, 5, RngStream(1, 2));
    for (const auto& p : set.particles) {
      CHECK((p.state.r - b.mean.r).norm() == 0.0);
      CHECK((p.state.t - b.mean.t).norm() == 0.0);
      CHECK(p.weight == doctest::Approx(0.2));
    }
  }

  SUBCASE("bit-identical across runs and exec modes") {
    b.cov = diag_cov(0.03, 0.002);
    const auto s1 = sample(b, 512, RngStream(7, 3), ExecMode::Parallel);
    const auto s2 = sample(b, 512, RngStream(7, 3), ExecMode::Serial);
    REQUIRE(s1.size() == s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
      CHECK((s1.particles[i].state.r - s2.particles[i].state.r).norm() == 0.0);
      CHECK((s1.particles[i].state.t - s2.particles[i].state.t).norm() == 0.0);
    }
  }

  SUBCASE("empirical covariance approaches the input") {
    b.cov = diag_cov(0.05, 0.004);
    const auto set = sample(b, 100000, RngStream(11, 4));
    std::vector<Pose> poses;
    poses.reserve(set.size());
    for (const auto& p : set.particles) poses.push_back(p.state);
    const Mat6 emp = oracle::empirical_cov(poses, b.mean);
    CHECK(oracle::rel_frobenius(emp, b.cov) < 0.05);
  }

  CHECK_THROWS_AS(sample(b, 0, RngStream(0, 0)), std::invalid_argument);
}

TEST_CASE("fit_gaussian: frozen cases and the sampling round trip") {
  SUBCASE("identical particles give zero covariance") {
    const Pose p(rot_z(0.2), Vec3(1, 2, 3));
    const auto set = PoseParticles::uniform({p, p, p});
    const PoseBelief b = fit_gaussian(set);
    CHECK((b.mean.r - p.r).norm() < 1e-12);
    CHECK(b.cov.norm() < 1e-20);
  }

  SUBCASE("two particles one mm apart give 1e-6 variance") {
    const Pose a(Mat3::Identity(), Vec3(1e-3, 0, 0));
    const Pose b(Mat3::Identity(), Vec3(-1e-3, 0, 0));
    const PoseBelief fit = fit_gaussian(PoseParticles::uniform({a, b}));
    CHECK(fit.cov(3, 3) == doctest::Approx(1e-6));
    CHECK(fit.mean.t.norm() < 1e-15);
  }

  SUBCASE("round trip through sample") {
    PoseBelief b;
    b.mean = Pose(exp_so3(Vec3(0.2, 0.1, -0.4)), Vec3(0.3, -0.2, 0.1));
    b.cov = diag_cov(0.04, 0.003);
    b.cov(1, 5) = b.cov(5, 1) = 1.5e-5;
    const PoseBelief fit = fit_gaussian(sample(b, 100000, RngStream(21, 5)));
    CHECK(oracle::rel_frobenius(fit.cov, b.cov) < 0.05);
    CHECK(manip::log_so3(fit.mean.r * b.mean.r.transpose()).norm() < 1e-3);
    CHECK((fit.mean.t - b.mean.t).norm() < 1e-3);
  }

  SUBCASE("rejects degenerate inputs") {
    const Pose p;
    CHECK_THROWS_AS(fit_gaussian(PoseParticles::uniform({p})), std::invalid_argument);
    auto set = PoseParticles::uniform({p, p});
    set.particles[0].weight = 0.0;
    set.particles[1].weight = 0.0;
    CHECK_THROWS_AS(fit_gaussian(set), std::invalid_argument);
  }
}

TEST_CASE("monte_carlo_covariance") {
  const Pose mean(rot_z(0.25), Vec3(0.0, 0.1, 0.2));

  SUBCASE("constant generator gives zero covariance") {
    const PoseBelief b = monte_carlo_covariance([&](std::size_t) { return mean; }, 100);
    CHECK(b.cov.norm() < 1e-20);
  }

  SUBCASE("recovers a known covariance") {
    Mat6 cov = diag_cov(0.03, 0.002);
    const Eigen::MatrixXd l = oracle::chol_of(cov);
    std::mt19937_64 eng(4242);
    const PoseBelief b = monte_carlo_covariance(
        [&](std::size_t) { return oracle::perturb(mean, l, eng); }, 100000);
    CHECK(oracle::rel_frobenius(b.cov, cov) < 0.05);
  }

  CHECK_THROWS_AS(monte_carlo_covariance([&](std::size_t) { return mean; }, 1),
                  std::invalid_argument);
}

TEST_CASE("project_to_plane") {
  PoseBelief b;
  b.mean = Pose(rot_z(0.3), Vec3(0.1, 0.2, 0.05));
  Mat6 cov = Mat6::Zero();
  cov.diagonal() << 1e-4, 2e-4, 3e-4, 4e-6, 5e-6, 6e-6;
  b.cov = cov;

  SUBCASE("identity table reads off the marginals") {
    const PlanarBelief p = project_to_plane(b, Pose::identity());
    CHECK(p.x == doctest::Approx(0.1));
    CHECK(p.y == doctest::Approx(0.2));
    CHECK(p.theta == doctest::Approx(0.3));
    CHECK(p.cov(0, 0) == doctest::Approx(4e-6));
    CHECK(p.cov(1, 1) == doctest::Approx(5e-6));
    CHECK(p.cov(2, 2) == doctest::Approx(3e-4));
  }

  SUBCASE("zero covariance projects to zero") {
    b.cov.setZero();
    const PlanarBelief p = project_to_plane(b, Pose::identity());
    CHECK(p.cov.norm() == 0.0);
  }

  SUBCASE("rotated table swaps the x/y variances") {
    const Pose table(rot_z(M_PI / 2), Vec3::Zero());
    const PlanarBelief p = project_to_plane(b, table);
    CHECK(p.cov(0, 0) == doctest::Approx(5e-6));
    CHECK(p.cov(1, 1) == doctest::Approx(4e-6));
  }
}

TEST_CASE("psd validation") {
  PoseBelief a;
  a.cov = Mat6::Identity() * 1e-4;
  a.cov(0, 1) = 5e-3;  // asymmetric
  CHECK_THROWS_AS(compose_beliefs(a, PoseBelief{}), std::invalid_argument);

  PoseBelief b;
  b.cov = -1e-6 * Mat6::Identity();
  CHECK_THROWS_AS(invert_belief(b), std::invalid_argument);

  PoseBelief c;
  c.cov = diag_cov(0.5, 0.001);  // rotation spread beyond first-order validity
  CHECK_THROWS_AS(compose_beliefs(c, PoseBelief{}), std::invalid_argument);
}

TEST_CASE("planar sampling and fitting") {
  PlanarBelief b;
  b.x = 0.01;
  b.y = -0.02;
  b.theta = 0.1;
  b.cov.diagonal() << 2.5e-5, 2.5e-5, 7.6e-3;

  const auto set = sample_planar(b, 50000, RngStream(31, 6));
  const PlanarBelief fit = fit_planar_gaussian(set);
  CHECK(fit.x == doctest::Approx(b.x).epsilon(0.05));
  CHECK(fit.theta == doctest::Approx(b.theta).epsilon(0.05));
  CHECK(oracle::rel_frobenius(fit.cov, b.cov) < 0.05);

  const auto s1 = sample_planar(b, 256, RngStream(8, 1), ExecMode::Serial);
  const auto s2 = sample_planar(b, 256, RngStream(8, 1), ExecMode::Parallel);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1.particles[i].state.x == s2.particles[i].state.x);
    CHECK(s1.particles[i].state.theta == s2.particles[i].state.theta);
  }
}
