#include "manip/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace manip {

Json pose_to_json(const Pose& p) {
  Json j;
  auto& r = j["r"] = Json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r.push_back(p.r(i, k));
  j["t"] = {p.t.x(), p.t.y(), p.t.z()};
  return j;
}

Pose pose_from_json(const Json& j) {
  const auto& r = j.at("r");
  const auto& t = j.at("t");
  if (r.size() != 9 || t.size() != 3) throw std::invalid_argument("pose_from_json: bad shape");
  Pose p;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) p.r(i, k) = r.at(3 * i + k).get<double>();
  for (int i = 0; i < 3; ++i) p.t(i) = t.at(i).get<double>();
  if (!is_rotation(p.r, 1e-6)) throw std::invalid_argument("pose_from_json: rotation block invalid");
  return renormalized(p);
}

Json belief_to_json(const PoseBelief& b) {
  Json j;
  j["mean"] = pose_to_json(b.mean);
  auto& c = j["cov"] = Json::array();
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) c.push_back(b.cov(i, k));
  return j;
}

PoseBelief belief_from_json(const Json& j) {
  PoseBelief b;
  b.mean = pose_from_json(j.at("mean"));
  const auto& c = j.at("cov");
  if (c.size() != 36) throw std::invalid_argument("belief_from_json: cov must have 36 entries");
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) b.cov(i, k) = c.at(6 * i + k).get<double>();
  return b;
}

void save_particles_csv(const std::string& path, const ParticleSet<Pose>& particles) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_particles_csv: cannot open " + path);
  out.precision(17);
  for (const auto& p : particles.particles) {
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) out << p.state.r(i, k) << ',';
    out << p.state.t.x() << ',' << p.state.t.y() << ',' << p.state.t.z() << ',' << p.weight << '\n';
  }
}

void save_planar_particles_csv(const std::string& path, const ParticleSet<PlanarPose>& particles) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_planar_particles_csv: cannot open " + path);
  out.precision(17);
  for (const auto& p : particles.particles)
    out << p.state.x << ',' << p.state.y << ',' << p.state.theta << ',' << p.weight << '\n';
}

}  // namespace manip
