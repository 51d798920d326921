#include "manip/spiral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "manip/belief.hpp"

namespace manip {

double pitch_for_tol(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("pitch_for_tol: tol must be positive");
  return std::sqrt(2.0) * 0.99 * tol;
}

SpiralPlan circular_spiral(double pitch, double r_max) {
  if (!(pitch > 0.0) || pitch > r_max)
    throw std::invalid_argument("circular_spiral: need 0 < pitch <= r_max");

  const double b = pitch / (2.0 * M_PI);  // radial growth per radian
  SpiralPlan plan;
  plan.pitch = pitch;
  plan.bound = r_max;
  plan.waypoints.emplace_back(0.0, 0.0);

  const double r_stop = r_max + 0.5 * pitch;
  const double cap = 0.98 * pitch;
  double phi = 0.0;
  while (true) {
    const double r = b * phi;
    // Arc length bounds the chord; capping it keeps consecutive waypoints
    // within one pitch. One midpoint pass corrects the growth of r over the
    // step, which matters on the innermost turn.
    double dphi = cap / std::sqrt(r * r + b * b);
    const double rm = r + 0.5 * b * dphi;
    dphi = cap / std::sqrt(rm * rm + b * b);
    phi += dphi;
    const double rn = b * phi;
    if (rn > r_stop) break;
    plan.waypoints.emplace_back(rn * std::cos(phi), rn * std::sin(phi));
  }
  return plan;
}

namespace {

// Canonical eigenframe of a 2x2 covariance: columns (major, minor), right
// handed, deterministic signs.
void eigenframe(const Mat2& cov, Vec2& e_major, Vec2& e_minor, double& s_major, double& s_minor) {
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("elliptical_spiral: covariance not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat2> es(cov);
  const Vec2 eig = es.eigenvalues();  // ascending
  if (eig(0) < -1e-12) throw std::invalid_argument("elliptical_spiral: covariance not PSD");
  s_major = std::sqrt(std::max(eig(1), 0.0));
  s_minor = std::sqrt(std::max(eig(0), 0.0));
  e_major = es.eigenvectors().col(1);
  e_minor = es.eigenvectors().col(0);
  if (e_major.x() < 0.0 || (e_major.x() == 0.0 && e_major.y() < 0.0)) e_major = -e_major;
  // Right-handed frame.
  if (e_major.x() * e_minor.y() - e_major.y() * e_minor.x() < 0.0) e_minor = -e_minor;
}

SpiralPlan line_search_plan(const Vec2& dir, double spacing, double extent) {
  SpiralPlan plan;
  plan.pitch = spacing;
  plan.bound = extent;
  plan.waypoints.emplace_back(0.0, 0.0);
  for (double d = spacing; d <= extent + 1e-15; d += spacing) {
    plan.waypoints.emplace_back(d * dir);
    plan.waypoints.emplace_back(-d * dir);
  }
  return plan;
}

}  // namespace

SpiralPlan elliptical_spiral(const Mat2& cov_xy, double tol, double n_sigma) {
  if (!(tol > 0.0)) throw std::invalid_argument("elliptical_spiral: tol must be positive");
  if (!(n_sigma > 0.0)) throw std::invalid_argument("elliptical_spiral: n_sigma must be positive");

  Vec2 e1, e2;
  double s1, s2;
  eigenframe(cov_xy, e1, e2, s1, s2);
  const double spacing = std::sqrt(2.0) * 0.99 * tol;
  const double cover = spacing / std::sqrt(2.0);  // worst distance to a cell center

  if (s1 * n_sigma <= 1e-12) {
    // Point belief: the mean is the only candidate.
    SpiralPlan p;
    p.pitch = spacing;
    p.bound = n_sigma;
    p.bound_in_sigma = true;
    p.waypoints.emplace_back(0.0, 0.0);
    return p;
  }
  if (s2 * n_sigma < cover) {
    // Degenerate belief: minor extent below one cell, search the major axis.
    SpiralPlan p = line_search_plan(e1, 2.0 * 0.99 * tol, n_sigma * s1);
    p.bound = n_sigma;
    p.bound_in_sigma = true;
    return p;
  }

  // Covering lattice in the eigenframe, ordered by Mahalanobis annulus and
  // swept by whitened angle within each annulus. Inclusion margin comes from
  // the local Mahalanobis gradient so thin ellipses stay tight.
  const double u_max = n_sigma * s1 + 1.1 * cover, v_max = n_sigma * s2 + 1.1 * cover;

  struct Entry {
    double maha, angle;
    Vec2 p;
  };
  std::vector<Entry> entries;
  const long iu = static_cast<long>(std::floor(u_max / spacing));
  const long iv = static_cast<long>(std::floor(v_max / spacing));
  for (long i = -iu; i <= iu; ++i) {
    for (long j = -iv; j <= iv; ++j) {
      const double u = static_cast<double>(i) * spacing;
      const double v = static_cast<double>(j) * spacing;
      const double wu = u / s1, wv = v / s2;
      const double m = std::sqrt(wu * wu + wv * wv);
      if (m > n_sigma) {
        if (m <= 0.0) continue;
        const double grad = std::hypot(wu / (s1 * m), wv / (s2 * m));
        if (m > n_sigma + 1.05 * cover * grad) continue;
      }
      entries.push_back({m, std::atan2(wv, wu), u * e1 + v * e2});
    }
  }

  const double annulus = spacing / s2;  // one lattice row thick on the minor axis
  std::stable_sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    const long ba = static_cast<long>(a.maha / annulus);
    const long bb = static_cast<long>(b.maha / annulus);
    if (ba != bb) return ba < bb;
    if (a.angle != b.angle) return a.angle < b.angle;
    return a.maha < b.maha;
  });

  SpiralPlan plan;
  plan.bound = n_sigma;
  plan.bound_in_sigma = true;
  plan.waypoints.reserve(entries.size() + 1);
  plan.waypoints.emplace_back(0.0, 0.0);
  for (const auto& e : entries)
    if (e.p.squaredNorm() > 0.0) plan.waypoints.push_back(e.p);

  double max_step = 0.0;
  for (std::size_t i = 1; i < plan.waypoints.size(); ++i)
    max_step = std::max(max_step, (plan.waypoints[i] - plan.waypoints[i - 1]).norm());
  plan.pitch = max_step;
  return plan;
}

RotationSweepPlan rotation_sweep(double sigma_theta, double k, double step) {
  if (!(sigma_theta > 0.0)) throw std::invalid_argument("rotation_sweep: sigma_theta must be positive");
  if (!(step > 0.0)) throw std::invalid_argument("rotation_sweep: step must be positive");
  RotationSweepPlan plan;
  plan.step = step;
  plan.bound = k * sigma_theta;
  plan.angles.push_back(0.0);
  for (int m = 1; static_cast<double>(m) * step <= plan.bound + 1e-12; ++m) {
    plan.angles.push_back(static_cast<double>(m) * step);
    plan.angles.push_back(-static_cast<double>(m) * step);
  }
  return plan;
}

SearchCost expected_search_cost(const SpiralPlan& plan, const Mat2& true_cov, double tol,
                                std::size_t n_mc, const RngStream& rng, ExecMode mode) {
  if (n_mc < 1) throw std::invalid_argument("expected_search_cost: n_mc must be >= 1");
  const Eigen::MatrixXd a = psd_sqrt(require_psd_dynamic(true_cov));

  std::vector<long> steps(n_mc, -1);
  parallel_for(n_mc, mode, [&](std::size_t i) {
    auto eng = rng.at(i);
    const Vec2 hole = a * Vec2(gauss(eng), gauss(eng));
    const double tol2 = tol * tol;
    for (std::size_t k = 0; k < plan.waypoints.size(); ++k) {
      if ((plan.waypoints[k] - hole).squaredNorm() <= tol2) {
        steps[i] = static_cast<long>(k) + 1;
        break;
      }
    }
  });

  double sum = 0.0, sum2 = 0.0;
  std::size_t found = 0;
  for (long s : steps) {
    if (s < 0) continue;
    ++found;
    sum += static_cast<double>(s);
    sum2 += static_cast<double>(s) * static_cast<double>(s);
  }
  SearchCost out;
  out.success_rate = static_cast<double>(found) / static_cast<double>(n_mc);
  if (found > 0) {
    out.mean_steps = sum / static_cast<double>(found);
    const double var = std::max(sum2 / static_cast<double>(found) - out.mean_steps * out.mean_steps, 0.0);
    out.std_steps = std::sqrt(var);
  }
  return out;
}

void save_plan_csv(const std::string& path, const SpiralPlan& plan) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_plan_csv: cannot open " + path);
  out.precision(17);
  out << "step,x,y\n";
  for (std::size_t i = 0; i < plan.waypoints.size(); ++i)
    out << i << ',' << plan.waypoints[i].x() << ',' << plan.waypoints[i].y() << '\n';
}

void save_plan_svg(const std::string& path, const SpiralPlan& plan, const Mat2& cov_xy) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_plan_svg: cannot open " + path);

  Vec2 e1, e2;
  double s1, s2;
  eigenframe(cov_xy, e1, e2, s1, s2);
  const double angle_deg = std::atan2(e1.y(), e1.x()) * 180.0 / M_PI;

  double extent = 4.0 * s1;
  for (const auto& w : plan.waypoints) extent = std::max(extent, w.norm());
  const double scale = 400.0 / (2.0 * extent);  // m to px, 800 px canvas

  out << "<svg xmlns='http://www.w3.org/2000/svg' viewBox='-400 -400 800 800'>\n";
  for (int k = 3; k >= 1; --k) {
    out << "  <ellipse cx='0' cy='0' rx='" << k * s1 * scale << "' ry='" << k * s2 * scale
        << "' transform='rotate(" << angle_deg << ")' fill='none' stroke='#88a' stroke-width='1'/>\n";
  }
  out << "  <polyline fill='none' stroke='#c33' stroke-width='0.8' points='";
  for (const auto& w : plan.waypoints) out << w.x() * scale << ',' << w.y() * scale << ' ';
  out << "'/>\n";
  for (const auto& w : plan.waypoints)
    out << "  <circle cx='" << w.x() * scale << "' cy='" << w.y() * scale << "' r='1.5' fill='#333'/>\n";
  out << "</svg>\n";
}

}  // namespace manip
