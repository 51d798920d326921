#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <fstream>
#include <map>
#include <random>

#include "manip/spiral.hpp"

using namespace manip;

namespace {

// Worst distance from any point of the region to the nearest waypoint,
// scanned on a grid. `inside` filters grid points to the region.
template <class Inside>
double coverage_radius(const SpiralPlan& plan, double extent, double grid,
                       Inside&& inside) {
  double worst = 0.0;
  const long n = static_cast<long>(std::ceil(extent / grid));
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (long i = -n; i <= n; ++i) {
    for (long j = -n; j <= n; ++j) {
      const Vec2 p(static_cast<double>(i) * grid, static_cast<double>(j) * grid);
      if (!inside(p)) continue;
      double best = 1e18;
      for (const auto& w : plan.waypoints) best = std::min(best, (w - p).squaredNorm());
      worst = std::max(worst, std::sqrt(best));
    }
  }
  return worst;
}

double max_consecutive_spacing(const SpiralPlan& plan) {
  double worst = 0.0;
  for (std::size_t i = 1; i < plan.waypoints.size(); ++i)
    worst = std::max(worst, (plan.waypoints[i] - plan.waypoints[i - 1]).norm());
  return worst;
}

}  // namespace

TEST_CASE("circular_spiral basics") {
  const double pitch = 1e-3, r_max = 8e-3;
  const SpiralPlan plan = circular_spiral(pitch, r_max);

  CHECK(plan.waypoints.front().norm() == 0.0);
  CHECK(max_consecutive_spacing(plan) <= pitch + 1e-12);

  // Archimedean turn gap: the radius advances by one pitch per turn.
  const double b = pitch / (2.0 * M_PI);
  for (std::size_t i = 1; i < plan.waypoints.size(); ++i) {
    const Vec2& w = plan.waypoints[i];
    // Recover the continuous parameter from the radius, then check the gap
    // to the same angle one turn later if it exists.
    const double r = w.norm();
    const double phi = r / b;
    (void)phi;
    CHECK(r <= r_max + 0.5 * pitch + 1e-12);
  }

  CHECK_THROWS_AS(circular_spiral(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(circular_spiral(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("circular_spiral covers the disk") {
  const double pitch = 1e-3, r_max = 6e-3;
  const SpiralPlan plan = circular_spiral(pitch, r_max);
  const double worst = coverage_radius(plan, r_max, 5e-5,
                                       [&](const Vec2& p) { return p.norm() <= r_max; });
  // Ring gap pitch and chords <= pitch: within pitch/2 plus the arc slack.
  CHECK(worst <= 0.5 * pitch + 0.21 * pitch);

  // At the tolerance-matched pitch the disk is covered within tol.
  const double tol = 5e-4;
  const SpiralPlan plan_tol = circular_spiral(pitch_for_tol(tol), r_max);
  const double worst_tol = coverage_radius(plan_tol, r_max, 5e-5,
                                           [&](const Vec2& p) { return p.norm() <= r_max; });
  CHECK(worst_tol <= tol);
}

TEST_CASE("elliptical_spiral: isotropic covariance behaves like the circular pattern") {
  const double tol = 5e-4, sigma = 2e-3, n_sigma = 4.0;
  Mat2 cov = Mat2::Zero();
  cov.diagonal() << sigma * sigma, sigma * sigma;

  const SpiralPlan ell = elliptical_spiral(cov, tol, n_sigma);
  const SpiralPlan circ = circular_spiral(pitch_for_tol(tol), n_sigma * sigma);

  const SearchCost ce = expected_search_cost(ell, cov, tol, 20000, RngStream(5, 0));
  const SearchCost cc = expected_search_cost(circ, cov, tol, 20000, RngStream(5, 0));
  CHECK(ce.success_rate > 0.999);
  CHECK(cc.success_rate > 0.999);
  CHECK(std::abs(ce.mean_steps - cc.mean_steps) / cc.mean_steps < 0.10);

  const double worst = coverage_radius(ell, n_sigma * sigma, 1e-4, [&](const Vec2& p) {
    return p.norm() <= n_sigma * sigma;
  });
  CHECK(worst <= tol);
}

TEST_CASE("elliptical_spiral: anisotropic coverage and ring shape") {
  const double tol = 5e-4, n_sigma = 4.0;
  Mat2 cov = Mat2::Zero();
  cov.diagonal() << 9e-6, 1e-6;  // 3 mm / 1 mm axes

  const SpiralPlan plan = elliptical_spiral(cov, tol, n_sigma);
  CHECK(plan.waypoints.front().norm() == 0.0);
  CHECK(max_consecutive_spacing(plan) <= plan.pitch + 1e-12);

  const double worst = coverage_radius(plan, n_sigma * 3e-3, 1e-4, [&](const Vec2& p) {
    const double m2 = p.x() * p.x() / 9e-6 + p.y() * p.y() / 1e-6;
    return m2 <= n_sigma * n_sigma;
  });
  CHECK(worst <= tol);

  // Ring bins follow the 3:1 iso-density ellipses: the second-moment axis
  // ratio of an outer ring is the covariance axis ratio.
  const double spacing = std::sqrt(2.0) * 0.99 * tol;
  const double annulus = spacing / 1e-3;
  std::map<long, std::vector<Vec2>> rings;
  for (const auto& w : plan.waypoints) {
    const double maha = std::sqrt(w.x() * w.x() / 9e-6 + w.y() * w.y() / 1e-6);
    rings[static_cast<long>(maha / annulus)].push_back(w);
  }
  long best_ring = -1;
  for (const auto& [k, pts] : rings)
    if (pts.size() >= 60) best_ring = std::max(best_ring, k);
  REQUIRE(best_ring >= 0);
  Mat2 moment = Mat2::Zero();
  for (const auto& p : rings[best_ring]) moment += p * p.transpose();
  Eigen::SelfAdjointEigenSolver<Mat2> es(moment);
  const double ratio = std::sqrt(es.eigenvalues()(1) / es.eigenvalues()(0));
  CHECK(ratio == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("elliptical_spiral: whitening invariance under rotations") {
  const double tol = 5e-4, n_sigma = 3.0;
  Mat2 cov = Mat2::Zero();
  cov.diagonal() << 9e-6, 1e-6;
  const double ang = 0.7;
  Mat2 s;
  s << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
  const Mat2 rotated = s * cov * s.transpose();

  const SpiralPlan base = elliptical_spiral(cov, tol, n_sigma);
  const SpiralPlan rot = elliptical_spiral(rotated, tol, n_sigma);
  REQUIRE(base.waypoints.size() == rot.waypoints.size());
  for (std::size_t i = 0; i < base.waypoints.size(); ++i)
    CHECK((rot.waypoints[i] - s * base.waypoints[i]).norm() < 1e-9);
}

TEST_CASE("elliptical_spiral: degenerate covariances") {
  const double tol = 5e-4;

  Mat2 line = Mat2::Zero();
  line(0, 0) = 4e-6;  // variance only along x
  const SpiralPlan plan = elliptical_spiral(line, tol, 4.0);
  for (const auto& w : plan.waypoints) CHECK(std::abs(w.y()) < 1e-15);
  // 1-D coverage of the searched segment.
  double worst = 0.0;
  for (double x = -8e-3; x <= 8e-3; x += 2.5e-5) {
    double best = 1e18;
    for (const auto& w : plan.waypoints) best = std::min(best, std::abs(w.x() - x));
    worst = std::max(worst, best);
  }
  CHECK(worst <= tol);

  const SpiralPlan point = elliptical_spiral(Mat2::Zero(), tol, 4.0);
  CHECK(point.waypoints.size() == 1);

  Mat2 bad;
  bad << 1e-6, 2e-6, 2e-6, 1e-6;  // indefinite
  CHECK_THROWS_AS(elliptical_spiral(bad, tol, 4.0), std::invalid_argument);
}

TEST_CASE("rotation_sweep") {
  const double deg = M_PI / 180.0;
  const RotationSweepPlan plan = rotation_sweep(1.0 * deg, 3.0, 1.0 * deg);
  REQUIRE(plan.angles.size() == 7);
  CHECK(plan.angles[0] == 0.0);
  CHECK(plan.angles[1] == doctest::Approx(1.0 * deg));
  CHECK(plan.angles[2] == doctest::Approx(-1.0 * deg));
  CHECK(plan.angles[5] == doctest::Approx(3.0 * deg));
  CHECK(plan.angles[6] == doctest::Approx(-3.0 * deg));
  for (double a : plan.angles) CHECK(std::abs(a) <= plan.bound + 1e-12);

  // Nearest-first beats a monotone left-to-right sweep on expected steps.
  const double sigma = 2.0 * deg, step = 0.5 * deg, k = 3.0;
  const RotationSweepPlan nearest = rotation_sweep(sigma, k, step);
  std::vector<double> monotone;
  for (double a = -k * sigma; a <= k * sigma + 1e-12; a += step) monotone.push_back(a);

  std::mt19937_64 eng(2025);
  std::normal_distribution<double> draw(0.0, sigma);
  double sum_nearest = 0.0, sum_monotone = 0.0;
  int found_both = 0;
  for (int i = 0; i < 10000; ++i) {
    const double truth = draw(eng);
    long a = -1, b = -1;
    for (std::size_t j = 0; j < nearest.angles.size(); ++j)
      if (std::abs(nearest.angles[j] - truth) <= 0.5 * step) {
        a = static_cast<long>(j) + 1;
        break;
      }
    for (std::size_t j = 0; j < monotone.size(); ++j)
      if (std::abs(monotone[j] - truth) <= 0.5 * step) {
        b = static_cast<long>(j) + 1;
        break;
      }
    if (a > 0 && b > 0) {
      sum_nearest += static_cast<double>(a);
      sum_monotone += static_cast<double>(b);
      ++found_both;
    }
  }
  REQUIRE(found_both > 9000);
  CHECK(sum_nearest < sum_monotone);

  CHECK_THROWS_AS(rotation_sweep(0.0, 3.0, 0.1), std::invalid_argument);
}

TEST_CASE("expected_search_cost") {
  const double tol = 5e-4;

  SUBCASE("point mass is found at the first step") {
    const SpiralPlan plan = circular_spiral(pitch_for_tol(tol), 5e-3);
    const SearchCost c = expected_search_cost(plan, Mat2::Zero(), tol, 500, RngStream(1, 0));
    CHECK(c.mean_steps == doctest::Approx(1.0));
    CHECK(c.success_rate == doctest::Approx(1.0));
    CHECK(c.std_steps == doctest::Approx(0.0));
  }

  SUBCASE("anisotropy rewards the covariance-shaped pattern") {
    Mat2 cov = Mat2::Zero();
    cov.diagonal() << 9e-6, 1e-6;
    const SpiralPlan ell = elliptical_spiral(cov, tol, 4.0);
    const SpiralPlan circ = circular_spiral(pitch_for_tol(tol), 4.0 * 3e-3);
    const SearchCost ce = expected_search_cost(ell, cov, tol, 10000, RngStream(2, 0));
    const SearchCost cc = expected_search_cost(circ, cov, tol, 10000, RngStream(2, 0));
    CHECK(ce.success_rate > 0.999);
    CHECK(ce.mean_steps <= 0.67 * cc.mean_steps);
  }

  SUBCASE("deterministic across exec modes") {
    Mat2 cov = Mat2::Zero();
    cov.diagonal() << 4e-6, 4e-6;
    const SpiralPlan plan = elliptical_spiral(cov, tol, 4.0);
    const SearchCost a = expected_search_cost(plan, cov, tol, 4000, RngStream(3, 0), ExecMode::Serial);
    const SearchCost b =
        expected_search_cost(plan, cov, tol, 4000, RngStream(3, 0), ExecMode::Parallel);
    CHECK(a.mean_steps == b.mean_steps);
    CHECK(a.std_steps == b.std_steps);
    CHECK(a.success_rate == b.success_rate);
  }
}

TEST_CASE("plan export") {
  Mat2 cov = Mat2::Zero();
  cov.diagonal() << 4e-6, 1e-6;
  const SpiralPlan plan = elliptical_spiral(cov, 5e-4, 3.0);
  save_plan_csv("plan_test.csv", plan);
  save_plan_svg("plan_test.svg", plan, cov);

  std::ifstream csv("plan_test.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "step,x,y");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == plan.waypoints.size());

  std::ifstream svg("plan_test.svg");
  std::string all((std::istreambuf_iterator<char>(svg)), std::istreambuf_iterator<char>());
  CHECK(all.find("<svg") != std::string::npos);
  CHECK(all.find("<ellipse") != std::string::npos);
  std::remove("plan_test.csv");
  std::remove("plan_test.svg");
}
