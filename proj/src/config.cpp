#include "manip/config.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <set>

#include "manip/polygon.hpp"

namespace manip {

namespace {

constexpr double kDeg = M_PI / 180.0;

Pose pose_from_config(const Json& j) {
  if (j.contains("r")) return pose_from_json(j);
  Pose p;
  if (j.contains("t")) {
    const auto& t = j.at("t");
    for (int i = 0; i < 3; ++i) p.t(i) = t.at(i).get<double>();
  }
  if (j.contains("yaw_deg")) p.r = rot_z(j.at("yaw_deg").get<double>() * kDeg);
  return p;
}

Vec3 vec3_from(const Json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

std::optional<Mat6> cov_from(const Json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  const auto& c = j.at(key);
  if (c.size() != 36) throw ConfigError(std::string(key) + " must have 36 entries");
  Mat6 m;
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) m(i, k) = c.at(6 * i + k).get<double>();
  return m;
}

template <class T>
void get_if(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void get_angle_if(const Json& j, const char* key_deg, double& out_rad) {
  if (j.contains(key_deg)) out_rad = j.at(key_deg).get<double>() * kDeg;
}

}  // namespace

Config config_from_json(const Json& j) {
  Config c;
  if (j.contains("scene")) {
    const auto& s = j.at("scene");
    if (s.contains("table")) c.scene.table = pose_from_config(s.at("table"));
    if (s.contains("camera")) c.scene.camera = pose_from_config(s.at("camera"));
    for (const auto& o : s.value("objects", Json::array())) {
      ObjectSpec obj;
      obj.id = o.at("id").get<std::string>();
      obj.pose = pose_from_config(o.at("pose"));
      if (o.contains("box_m")) obj.box = vec3_from(o.at("box_m"));
      for (const auto& f : o.value("features", Json::array())) obj.features.push_back(vec3_from(f));
      c.scene.objects.push_back(std::move(obj));
    }
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    get_angle_if(n, "cam_rot_sigma_deg", c.noise.cam_rot_sigma);
    get_if(n, "cam_trans_sigma_m", c.noise.cam_trans_sigma);
    get_angle_if(n, "obj_rot_sigma_deg", c.noise.obj_rot_sigma);
    get_if(n, "obj_trans_sigma_m", c.noise.obj_trans_sigma);
    get_if(n, "encoder_sigma_m", c.noise.encoder_sigma);
    get_if(n, "touch_pos_sigma_m", c.noise.touch_pos_sigma);
    get_angle_if(n, "touch_nor_sigma_deg", c.noise.touch_nor_sigma);
    get_if(n, "robot_positioning_negligible", c.noise.robot_positioning_negligible);
    c.noise.cam_cov_override = cov_from(n, "cam_cov");
    c.noise.obj_cov_override = cov_from(n, "obj_cov");
  }
  if (j.contains("grasp")) {
    const auto& g = j.at("grasp");
    get_if(g, "closing_step_m", c.grasp.closing_step);
    get_if(g, "max_opening_m", c.grasp.max_opening);
    get_if(g, "sigma_d_m", c.grasp.sigma_d);
    get_if(g, "penetration_tol_m", c.grasp.penetration_tol);
    get_if(g, "particles", c.grasp.particles);
  }
  if (j.contains("touch")) {
    const auto& t = j.at("touch");
    get_if(t, "m_per_round", c.touch.series.m_per_round);
    get_if(t, "zoom", c.touch.series.zoom);
    get_if(t, "delta_init_pos_m", c.touch.series.delta_init_pos);
    get_angle_if(t, "delta_init_rot_deg", c.touch.series.delta_init_rot);
    get_if(t, "delta_final_pos_m", c.touch.series.delta_final_pos);
    get_angle_if(t, "delta_final_rot_deg", c.touch.series.delta_final_rot);
    get_if(t, "sigma_pos_m", c.touch.series.sigma_pos);
    get_angle_if(t, "sigma_nor_deg", c.touch.series.sigma_nor);
    get_if(t, "max_centers", c.touch.series.max_centers);
    get_if(t, "plane_constraint", c.touch.series.plane_constraint);
    if (t.contains("faces")) c.touch.faces = t.at("faces").get<std::vector<std::string>>();
    get_if(t, "per_face", c.touch.per_face);
    get_if(t, "face_margin", c.touch.face_margin);
    get_if(t, "prior_offset_scale", c.touch.prior_offset_scale);
    get_if(t, "success_pos_m", c.touch.success_pos);
    get_angle_if(t, "success_rot_deg", c.touch.success_rot);
  }
  if (j.contains("search")) {
    const auto& s = j.at("search");
    get_if(s, "tol_m", c.search.tol);
    get_if(s, "n_sigma", c.search.n_sigma);
    get_if(s, "dwell_s", c.search.dwell);
    get_if(s, "sweep_k", c.search.sweep_k);
    get_angle_if(s, "sweep_step_deg", c.search.sweep_step);
    for (const auto& row : s.value("bench_covs", Json::array())) {
      if (row.size() != 4) throw ConfigError("search.bench_covs rows must have 4 entries");
      Mat2 m;
      m << row.at(0).get<double>(), row.at(1).get<double>(), row.at(2).get<double>(),
          row.at(3).get<double>();
      c.search.bench_covs.push_back(m);
    }
    get_if(s, "bench_n_mc", c.search.bench_n_mc);
  }
  if (j.contains("trials")) {
    const auto& t = j.at("trials");
    get_if(t, "count", c.trials.count);
    get_if(t, "base_seed", c.trials.base_seed);
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json j;
  try {
    in >> j;
    return config_from_json(j);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

namespace {

void check_positive(std::vector<std::string>& out, double v, const char* field) {
  if (!(v > 0.0)) out.push_back(std::string(field) + " must be positive");
}

void check_cov(std::vector<std::string>& out, const std::optional<Mat6>& cov, const char* field) {
  if (!cov) return;
  if (((*cov) - cov->transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    out.push_back(std::string(field) + " is not symmetric");
    return;
  }
  Eigen::SelfAdjointEigenSolver<Mat6> es(*cov);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-12)
    out.push_back(std::string(field) + " is not PSD (eigenvalue " + std::to_string(min_eig) + ")");
}

}  // namespace

std::vector<std::string> validate_config(const Config& c) {
  std::vector<std::string> out;

  if (c.scene.objects.empty()) out.push_back("scene.objects must not be empty");
  std::set<std::string> ids;
  for (const auto& o : c.scene.objects) {
    if (!ids.insert(o.id).second) out.push_back("duplicate object id: " + o.id);
    if (!is_rotation(o.pose.r, 1e-6)) out.push_back("object " + o.id + ": pose rotation invalid");
    if (!(o.box.x() > 0.0 && o.box.y() > 0.0 && o.box.z() > 0.0))
      out.push_back("object " + o.id + ": box_m must be positive");
    const Pose in_table = compose(invert(c.scene.table), o.pose);
    if (in_table.t.z() < 0.5 * o.box.z() - 1e-3)
      out.push_back("object " + o.id + ": below the table plane");
  }
  if (!is_rotation(c.scene.table.r, 1e-6)) out.push_back("scene.table rotation invalid");
  if (!is_rotation(c.scene.camera.r, 1e-6)) out.push_back("scene.camera rotation invalid");

  check_positive(out, c.noise.cam_rot_sigma, "noise.cam_rot_sigma_deg");
  check_positive(out, c.noise.cam_trans_sigma, "noise.cam_trans_sigma_m");
  check_positive(out, c.noise.obj_rot_sigma, "noise.obj_rot_sigma_deg");
  check_positive(out, c.noise.obj_trans_sigma, "noise.obj_trans_sigma_m");
  if (c.noise.encoder_sigma < 0.0) out.push_back("noise.encoder_sigma_m must be nonnegative");
  if (c.noise.touch_pos_sigma < 0.0) out.push_back("noise.touch_pos_sigma_m must be nonnegative");
  if (c.noise.touch_nor_sigma < 0.0) out.push_back("noise.touch_nor_sigma_deg must be nonnegative");
  check_cov(out, c.noise.cam_cov_override, "noise.cam_cov");
  check_cov(out, c.noise.obj_cov_override, "noise.obj_cov");

  if (!(c.grasp.closing_step > 0.0) || c.grasp.closing_step > 1e-3)
    out.push_back("grasp.closing_step_m must be in (0, 0.001]");
  check_positive(out, c.grasp.max_opening, "grasp.max_opening_m");
  check_positive(out, c.grasp.sigma_d, "grasp.sigma_d_m");
  if (c.grasp.particles < 2) out.push_back("grasp.particles must be >= 2");

  const auto& ss = c.touch.series;
  if (!(ss.zoom > 0.0) || !(ss.zoom < 1.0)) out.push_back("touch.zoom must be in (0, 1)");
  if (!(ss.delta_final_pos < ss.delta_init_pos))
    out.push_back("touch.delta_final_pos_m must be below delta_init_pos_m");
  if (!(ss.delta_final_rot < ss.delta_init_rot))
    out.push_back("touch.delta_final_rot_deg must be below delta_init_rot_deg");
  if (ss.m_per_round < 1) out.push_back("touch.m_per_round must be >= 1");
  if (ss.max_centers < 1) out.push_back("touch.max_centers must be >= 1");
  check_positive(out, ss.sigma_pos, "touch.sigma_pos_m");
  check_positive(out, ss.sigma_nor, "touch.sigma_nor_deg");
  if (c.touch.per_face < 1) out.push_back("touch.per_face must be >= 1");

  check_positive(out, c.search.tol, "search.tol_m");
  check_positive(out, c.search.n_sigma, "search.n_sigma");
  if (c.search.dwell < 0.0) out.push_back("search.dwell_s must be nonnegative");
  check_positive(out, c.search.sweep_step, "search.sweep_step_deg");
  check_positive(out, c.search.sweep_k, "search.sweep_k");

  if (c.trials.count < 1) out.push_back("trials.count must be >= 1");
  return out;
}

}  // namespace manip
