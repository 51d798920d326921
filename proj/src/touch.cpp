#include "manip/touch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace manip {

double proximity_likelihood(const TouchMeasurement& y, const Pose& x, const ShapeModel& s,
                            double sigma_pos, double sigma_nor) {
  if (!(sigma_pos > 0.0) || !(sigma_nor > 0.0))
    throw std::invalid_argument("proximity_likelihood: sigmas must be positive");
  double d;
  Vec3 n;
  s.surface_distance(x, y.pos, d, n);
  const double alpha = std::acos(std::clamp(y.nor.dot(n), -1.0, 1.0));
  const double rd = d / sigma_pos, ra = alpha / sigma_nor;
  return std::exp(-0.5 * rd * rd - 0.5 * ra * ra);
}

namespace {

double log_proximity(const TouchMeasurement& y, const Pose& x, const ShapeModel& s,
                     double sigma_pos, double sigma_nor) {
  double d;
  Vec3 n;
  s.surface_distance(x, y.pos, d, n);
  const double alpha = std::acos(std::clamp(y.nor.dot(n), -1.0, 1.0));
  const double rd = d / sigma_pos, ra = alpha / sigma_nor;
  return -0.5 * rd * rd - 0.5 * ra * ra;
}

Pose perturb_center(const Pose& center, const Vec6& xi, const ScalingSeriesParams& p) {
  if (!p.plane_constraint)
    return Pose(exp_so3(xi.head<3>()) * center.r, center.t + xi.tail<3>());
  // Planar constraint: perturb (x, y, yaw) in the table frame.
  const Pose rel = compose(invert(p.table), center);
  const Vec3 rot(0.0, 0.0, xi(2));
  const Vec3 tr(xi(3), xi(4), 0.0);
  return compose(p.table, Pose(exp_so3(rot) * rel.r, rel.t + tr));
}

}  // namespace

int scaling_series_rounds(const ScalingSeriesParams& p) {
  const double rp = std::log(p.delta_final_pos / p.delta_init_pos) / std::log(p.zoom);
  const double rr = std::log(p.delta_final_rot / p.delta_init_rot) / std::log(p.zoom);
  return static_cast<int>(std::max(std::ceil(rp - 1e-12), std::ceil(rr - 1e-12)));
}

ParticleSet<Pose> scaling_series(const PoseBelief& prior, const std::vector<TouchMeasurement>& meas,
                                 const ShapeModel& s, const ScalingSeriesParams& p,
                                 const RngStream& rng, ExecMode mode) {
  if (meas.empty()) throw std::invalid_argument("scaling_series: need at least one measurement");
  if (!(p.zoom > 0.0) || !(p.zoom < 1.0)) throw std::invalid_argument("scaling_series: zoom must be in (0,1)");
  if (!(p.delta_final_pos < p.delta_init_pos) || !(p.delta_final_rot < p.delta_init_rot))
    throw std::invalid_argument("scaling_series: delta_final must be below delta_init");
  if (p.m_per_round < 1) throw std::invalid_argument("scaling_series: m_per_round must be >= 1");
  require_psd(prior.cov);

  const int rounds = scaling_series_rounds(p);
  std::vector<Pose> centers{prior.mean};
  std::vector<Pose> cand;
  std::vector<double> logw;

  for (int r = 0; r < rounds; ++r) {
    const double zf = std::pow(p.zoom, r);
    const double dp = std::max(p.delta_init_pos * zf, p.delta_final_pos);
    const double dr = std::max(p.delta_init_rot * zf, p.delta_final_rot);
    const double sp = p.sigma_pos * (dp / p.delta_final_pos);
    const double sn = p.sigma_nor * (dr / p.delta_final_rot);

    const std::size_t m = static_cast<std::size_t>(p.m_per_round);
    const std::size_t n_cand = centers.size() * m;
    cand.assign(n_cand, Pose());
    logw.assign(n_cand, 0.0);
    const RngStream round_rng = rng.child(static_cast<std::uint64_t>(r));

    parallel_for(n_cand, mode, [&](std::size_t k) {
      auto eng = round_rng.at(k);
      Vec6 xi;
      // Rotation draws must stay on the principal branch of the exponential.
      for (int tries = 0;; ++tries) {
        for (int i = 0; i < 3; ++i) xi(i) = uniform(eng, -dr, dr);
        if (xi.head<3>().norm() < 0.999 * M_PI) break;
        if (tries > 200) {
          xi.head<3>() *= (0.999 * M_PI) / xi.head<3>().norm();
          break;
        }
      }
      for (int i = 3; i < 6; ++i) xi(i) = uniform(eng, -dp, dp);
      const Pose x = perturb_center(centers[k / m], xi, p);
      double lw = 0.0;
      for (const auto& y : meas) lw += log_proximity(y, x, s, sp, sn);
      cand[k] = x;
      logw[k] = lw;
    });

    const double lmax = *std::max_element(logw.begin(), logw.end());
    if (!std::isfinite(lmax) || lmax < -700.0) throw TouchDivergence();

    const double cut = lmax + std::log(0.01);
    std::vector<std::size_t> keep;
    keep.reserve(n_cand);
    for (std::size_t k = 0; k < n_cand; ++k)
      if (logw[k] >= cut) keep.push_back(k);
    if (keep.empty()) throw TouchDivergence();
    if (keep.size() > static_cast<std::size_t>(p.max_centers)) {
      std::stable_sort(keep.begin(), keep.end(),
                       [&](std::size_t a, std::size_t b) { return logw[a] > logw[b]; });
      keep.resize(static_cast<std::size_t>(p.max_centers));
    }
    centers.clear();
    centers.reserve(keep.size());
    for (std::size_t k : keep) centers.push_back(cand[k]);
  }

  // Final weighting of the surviving candidates at the true sigmas.
  std::vector<double> final_lw(centers.size());
  parallel_for(centers.size(), mode, [&](std::size_t k) {
    double lw = 0.0;
    for (const auto& y : meas) lw += log_proximity(y, centers[k], s, p.sigma_pos, p.sigma_nor);
    final_lw[k] = lw;
  });
  const double lmax = *std::max_element(final_lw.begin(), final_lw.end());
  if (!std::isfinite(lmax)) throw TouchDivergence();

  ParticleSet<Pose> out;
  out.particles.resize(centers.size());
  for (std::size_t k = 0; k < centers.size(); ++k) {
    out.particles[k].state = centers[k];
    out.particles[k].weight = std::exp(final_lw[k] - lmax);
  }
  out.normalize();
  return out;
}

std::vector<TouchMeasurement> load_touch_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_touch_csv: cannot open " + path);
  std::vector<TouchMeasurement> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    TouchMeasurement m;
    char comma;
    ss >> m.pos.x() >> comma >> m.pos.y() >> comma >> m.pos.z() >> comma >> m.nor.x() >> comma >>
        m.nor.y() >> comma >> m.nor.z();
    if (!ss) throw std::runtime_error("load_touch_csv: malformed row: " + line);
    const double n = m.nor.norm();
    if (std::abs(n - 1.0) > 1e-9) throw std::runtime_error("load_touch_csv: normal not unit length");
    out.push_back(m);
  }
  return out;
}

void save_touch_csv(const std::string& path, const std::vector<TouchMeasurement>& meas) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_touch_csv: cannot open " + path);
  out.precision(17);
  for (const auto& m : meas)
    out << m.pos.x() << ',' << m.pos.y() << ',' << m.pos.z() << ',' << m.nor.x() << ',' << m.nor.y()
        << ',' << m.nor.z() << '\n';
}

}  // namespace manip
