#include "manip/sim_world.hpp"

#include <cmath>

namespace manip {

Scene Scene::from_spec(const SceneSpec& spec) {
  Scene s;
  s.table = spec.table;
  s.camera_truth = spec.camera;
  for (const auto& o : spec.objects) {
    s.true_poses.emplace(o.id, o.pose);
    s.shapes.emplace(o.id, ShapeModel::box(o.box.x(), o.box.y(), o.box.z()));
    s.cross_sections.emplace(o.id, ConvexPolygon::rectangle(o.box.x(), o.box.y()));
    s.features.emplace(o.id, o.features);
    s.boxes.emplace(o.id, o.box);
  }
  return s;
}

const Pose& Scene::true_pose(const std::string& id) const {
  auto it = true_poses.find(id);
  if (it == true_poses.end()) throw SimError("unknown object id: " + id);
  return it->second;
}

NoiseConfig NoiseConfig::from_spec(const NoiseSpec& spec) {
  NoiseConfig n;
  auto diag_cov = [](double rot_sigma, double trans_sigma) {
    Mat6 c = Mat6::Zero();
    c.topLeftCorner<3, 3>() = rot_sigma * rot_sigma * Mat3::Identity();
    c.bottomRightCorner<3, 3>() = trans_sigma * trans_sigma * Mat3::Identity();
    return c;
  };
  n.cam_belief.cov = spec.cam_cov_override.value_or(diag_cov(spec.cam_rot_sigma, spec.cam_trans_sigma));
  n.meas_belief.cov = spec.obj_cov_override.value_or(diag_cov(spec.obj_rot_sigma, spec.obj_trans_sigma));
  n.encoder_sigma = spec.encoder_sigma;
  n.touch_pos_sigma = spec.touch_pos_sigma;
  n.touch_nor_sigma = spec.touch_nor_sigma;
  n.robot_positioning_negligible = spec.robot_positioning_negligible;
  return n;
}

Pose sample_pose(const Pose& mean, const Mat6& cov, std::mt19937_64& eng) {
  const Eigen::MatrixXd a = psd_sqrt(cov);
  Vec6 z;
  for (int k = 0; k < 6; ++k) z(k) = gauss(eng);
  const Vec6 xi = a * z;
  return Pose(exp_so3(xi.head<3>()) * mean.r, mean.t + xi.tail<3>());
}

PoseBelief observe_object(const Scene& scene, const NoiseConfig& noise, const std::string& id,
                          const RngStream& rng) {
  const Pose& truth = scene.true_pose(id);
  const Pose cam_to_obj_true = compose(invert(scene.camera_truth), truth);

  auto eng_cam = rng.at(0);
  auto eng_obj = rng.at(1);
  const Pose cam_sample = sample_pose(scene.camera_truth, noise.cam_belief.cov, eng_cam);
  const Pose obj_sample = sample_pose(cam_to_obj_true, noise.meas_belief.cov, eng_obj);

  return compose_beliefs(PoseBelief(cam_sample, noise.cam_belief.cov),
                         PoseBelief(obj_sample, noise.meas_belief.cov));
}

double simulate_encoder(const Scene& scene, const GraspParams& g, const std::string& id,
                        const Pose& gripper, const NoiseConfig& noise, const RngStream& rng) {
  const Pose rel = compose(invert(gripper), scene.true_pose(id));
  const PlanarPose true_planar{rel.t.x(), rel.t.y(),
                               wrap_angle(std::atan2(rel.r(1, 0), rel.r(0, 0)))};
  auto it = scene.cross_sections.find(id);
  if (it == scene.cross_sections.end()) throw SimError("unknown object id: " + id);
  const GraspOutcome out = simulate_grasp(true_planar, it->second, g);

  auto eng = rng.at(0);
  const double measured = out.width + gauss(eng, noise.encoder_sigma);
  return std::clamp(measured, 0.0, g.max_opening);
}

TouchMeasurement simulate_touch(const Scene& scene, const std::string& id, const Vec3& origin,
                                const Vec3& dir, const NoiseConfig& noise, const RngStream& rng,
                                std::uint64_t index) {
  auto it = scene.shapes.find(id);
  if (it == scene.shapes.end()) throw SimError("unknown object id: " + id);
  const auto hit = it->second.raycast(scene.true_pose(id), origin, dir.normalized());
  if (!hit) throw SimError("simulate_touch: ray misses object " + id);

  auto eng = rng.at(index);
  TouchMeasurement m;
  m.pos = hit->first + Vec3(gauss(eng, noise.touch_pos_sigma), gauss(eng, noise.touch_pos_sigma),
                            gauss(eng, noise.touch_pos_sigma));
  // Tilt the normal by an angle drawn from N(0, sigma^2) about a random axis
  // perpendicular to it.
  const Vec3 n = hit->second;
  Vec3 u = n.cross(Vec3::UnitX());
  if (u.norm() < 1e-6) u = n.cross(Vec3::UnitY());
  u.normalize();
  const Vec3 v = n.cross(u);
  const double psi = uniform(eng, 0.0, 2.0 * M_PI);
  const Vec3 axis = std::cos(psi) * u + std::sin(psi) * v;
  const double angle = gauss(eng, noise.touch_nor_sigma);
  m.nor = (exp_so3(angle * axis) * n).normalized();
  return m;
}

InsertionResult run_insertion_trial(const SpiralPlan& plan, const Vec2& truth_offset, double tol,
                                    double dwell) {
  if (plan.waypoints.empty()) throw SimError("run_insertion_trial: empty plan");
  InsertionResult r;
  for (std::size_t k = 0; k < plan.waypoints.size(); ++k) {
    const double d = (plan.waypoints[k] - truth_offset).norm();
    if (d <= tol) {
      r.success = true;
      r.steps = static_cast<long>(k) + 1;
      r.error_m = d;
      r.seconds = static_cast<double>(r.steps) * dwell;
      return r;
    }
  }
  r.success = false;
  r.steps = static_cast<long>(plan.waypoints.size());
  r.seconds = static_cast<double>(r.steps) * dwell;
  r.error_m = truth_offset.norm();
  return r;
}

}  // namespace manip
