#include "manip/scenario.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace manip {

namespace {

// Substream ids for the per-trial rng tree.
constexpr std::uint64_t kPerceptionStream = 1;
constexpr std::uint64_t kGraspStream = 2;
constexpr std::uint64_t kTouchStream = 3;
constexpr std::uint64_t kSearchStream = 4;
constexpr std::uint64_t kPriorStream = 5;

double yaw_of(const Mat3& r) { return std::atan2(r(1, 0), r(0, 0)); }

Pose lift_planar(const PlanarPose& p, double z) {
  return Pose(rot_z(p.theta), Vec3(p.x, p.y, z));
}

PoseBelief lift_planar_belief(const PlanarBelief& pb, double z) {
  PoseBelief b;
  b.mean = Pose(rot_z(pb.theta), Vec3(pb.x, pb.y, z));
  const int idx[3] = {3, 4, 2};  // (x, y, theta) rows of the 6x6 ordering
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b.cov(idx[i], idx[j]) = pb.cov(i, j);
  return b;
}

Json vec2_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

Json mat2_json(const Mat2& m) { return Json::array({m(0, 0), m(0, 1), m(1, 0), m(1, 1)}); }

Json planar_belief_json(const PlanarBelief& b) {
  Json j;
  j["mean"] = Json::array({b.x, b.y, b.theta});
  auto& c = j["cov"] = Json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) c.push_back(b.cov(i, k));
  return j;
}

double mahalanobis2(const Vec2& off, const Mat2& cov) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(cov);
  double m2 = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double proj = es.eigenvectors().col(k).dot(off);
    const double eig = es.eigenvalues()(k);
    if (eig > 1e-18)
      m2 += proj * proj / eig;
    else if (std::abs(proj) > 1e-12)
      m2 += 1e12;  // offset outside a collapsed direction
  }
  return m2;
}

// Covariance of the feature position expressed in the parent frame:
// p = R f + t under the left-perturbation convention.
Mat3 feature_cov(const PoseBelief& b, const Vec3& feature) {
  Eigen::Matrix<double, 3, 6> j;
  j.leftCols<3>() = -hat(b.mean.r * feature);
  j.rightCols<3>() = Mat3::Identity();
  return j * b.cov * j.transpose();
}

GraspParams grasp_params(const Config& cfg) {
  GraspParams g;
  g.closing_axis = Vec2(1.0, 0.0);  // jaws close across the box's short side
  g.max_opening = cfg.grasp.max_opening;
  g.closing_step = cfg.grasp.closing_step;
  g.sigma_d = cfg.grasp.sigma_d;
  g.force_limit_proxy = cfg.grasp.penetration_tol;
  return g;
}

struct GraspStage {
  Pose gripper;                // world frame
  PoseBelief object_in_gripper;  // post-grasp belief
  Pose true_object_in_gripper;
  double encoder = 0.0;
  PlanarBelief prior_planar, posterior_planar;
};

// Perception-conditioned grasp of `id`: the gripper is sent to the believed
// object pose (table-aligned), the encoder is read from the true pose, and
// the planar particle filter is updated.
GraspStage run_grasp_stage(const Config& cfg, const Scene& scene, const NoiseConfig& noise,
                           const std::string& id, const PoseBelief& belief, std::uint64_t seed,
                           ExecMode mode) {
  GraspStage st;
  const PlanarBelief pb = project_to_plane(belief, scene.table);
  const double z_center = 0.5 * scene.boxes.at(id).z();
  st.gripper = compose(scene.table, Pose(rot_z(pb.theta), Vec3(pb.x, pb.y, z_center)));

  const PoseBelief in_gripper = compose_beliefs(PoseBelief::exact(invert(st.gripper)), belief);
  st.prior_planar = project_to_plane(in_gripper, Pose::identity());

  const RngStream rng(seed, kGraspStream);
  const GraspParams gp = grasp_params(cfg);
  PlanarParticles particles =
      sample_planar(st.prior_planar, static_cast<std::size_t>(cfg.grasp.particles), rng.child(0), mode);
  st.encoder = simulate_encoder(scene, gp, id, st.gripper, noise, rng.child(1));
  particles = grasp_update(particles, scene.cross_sections.at(id), gp, st.encoder, rng.child(2), mode);
  st.posterior_planar = fit_planar_gaussian(particles);
  st.object_in_gripper = lift_planar_belief(st.posterior_planar, 0.0);

  const Pose rel_true = compose(invert(st.gripper), scene.true_pose(id));
  const PlanarPose true_planar{rel_true.t.x(), rel_true.t.y(), wrap_angle(yaw_of(rel_true.r))};
  const GraspOutcome true_out = simulate_grasp(true_planar, scene.cross_sections.at(id), gp);
  st.true_object_in_gripper = lift_planar(true_out.final_pose, rel_true.t.z());
  return st;
}

struct InsertionGeometry {
  Pose g_ins;            // world gripper pose at insertion
  PoseBelief relative;   // believed static-to-grasped transform
  Mat2 cov_xy;           // believed covariance of the pin/hole offset
  Vec2 truth_offset;     // true offset in the believed static-object frame
};

InsertionGeometry insertion_geometry(const Scene& scene, const std::string& id_static,
                                     const PoseBelief& b_static, const PoseBelief& b_in_gripper,
                                     const Pose& true_in_gripper, const Vec3& pin,
                                     const Vec3& hole) {
  InsertionGeometry g;
  const Pose target(Mat3::Identity(), pin - hole);  // hole mated onto the pin
  g.g_ins = compose(compose(b_static.mean, target), invert(b_in_gripper.mean));

  g.relative = compose_beliefs(invert_belief(b_static),
                               compose_beliefs(PoseBelief::exact(g.g_ins), b_in_gripper));
  const Mat3 cd = feature_cov(g.relative, hole);
  g.cov_xy = cd.topLeftCorner<2, 2>();

  const Vec3 pin_world = transform_point(scene.true_pose(id_static), pin);
  const Vec3 hole_world = transform_point(compose(g.g_ins, true_in_gripper), hole);
  const Vec3 off = b_static.mean.r.transpose() * (pin_world - hole_world);
  g.truth_offset = Vec2(off.x(), off.y());
  return g;
}

SpiralPlan circular_baseline(const Mat2& cov_xy, double tol, double n_sigma) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(cov_xy);
  const double s_major = std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
  const double pitch = pitch_for_tol(tol);
  return circular_spiral(pitch, std::max(n_sigma * s_major, pitch));
}

}  // namespace

ScenarioKind scenario_from_name(const std::string& name) {
  if (name == "single-pin") return ScenarioKind::SinglePin;
  if (name == "double-pin") return ScenarioKind::DoublePin;
  if (name == "grasp-only") return ScenarioKind::GraspOnly;
  if (name == "touch-only") return ScenarioKind::TouchOnly;
  if (name == "spiral-bench") return ScenarioKind::SpiralBench;
  throw ConfigError("unknown scenario: " + name);
}

std::string scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::SinglePin: return "single-pin";
    case ScenarioKind::DoublePin: return "double-pin";
    case ScenarioKind::GraspOnly: return "grasp-only";
    case ScenarioKind::TouchOnly: return "touch-only";
    case ScenarioKind::SpiralBench: return "spiral-bench";
  }
  return "unknown";
}

Json report_to_json(const TrialReport& r) {
  Json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["success"] = r.success;
  j["failure_stage"] = r.failure_stage;
  j["steps"] = r.steps;
  j["sweep_steps"] = r.sweep_steps;
  j["seconds"] = r.seconds;
  j["error_m"] = r.error_m;
  j["maha2"] = r.maha2;
  j["circular_steps"] = r.circular_steps;
  j["stage_beliefs"] = r.stage_beliefs;
  j["extra"] = r.extra;
  return j;
}

TrialReport run_single_pin_scenario(const Config& cfg, std::uint64_t seed, ExecMode mode) {
  TrialReport rep;
  rep.scenario = "single-pin";
  rep.seed = seed;
  std::string stage = "setup";
  try {
    if (cfg.scene.objects.size() < 2) throw ConfigError("single-pin needs two objects");
    const Scene scene = Scene::from_spec(cfg.scene);
    const NoiseConfig noise = NoiseConfig::from_spec(cfg.noise);
    const std::string id1 = cfg.scene.objects[0].id;  // static, carries the pin
    const std::string id2 = cfg.scene.objects[1].id;  // grasped, carries the hole
    if (scene.features.at(id1).empty() || scene.features.at(id2).empty())
      throw ConfigError("single-pin objects need one feature each");

    stage = "perception";
    const RngStream perc(seed, kPerceptionStream);
    const PoseBelief b1 = observe_object(scene, noise, id1, perc.child(0));
    const PoseBelief b2 = observe_object(scene, noise, id2, perc.child(1));
    rep.stage_beliefs["perception_static"] = belief_to_json(b1);
    rep.stage_beliefs["perception_grasped"] = belief_to_json(b2);

    stage = "grasp";
    const GraspStage gs = run_grasp_stage(cfg, scene, noise, id2, b2, seed, mode);
    rep.stage_beliefs["grasped_in_gripper"] = belief_to_json(gs.object_in_gripper);
    rep.extra["encoder_m"] = gs.encoder;
    rep.extra["posterior_planar"] = planar_belief_json(gs.posterior_planar);

    stage = "chain";
    const InsertionGeometry geo =
        insertion_geometry(scene, id1, b1, gs.object_in_gripper, gs.true_object_in_gripper,
                           scene.features.at(id1)[0], scene.features.at(id2)[0]);
    rep.stage_beliefs["relative"] = belief_to_json(geo.relative);
    rep.extra["cov_xy"] = mat2_json(geo.cov_xy);
    rep.extra["truth_offset"] = vec2_json(geo.truth_offset);
    rep.maha2 = mahalanobis2(geo.truth_offset, geo.cov_xy);

    stage = "search-translation";
    const SpiralPlan ell = elliptical_spiral(geo.cov_xy, cfg.search.tol, cfg.search.n_sigma);
    const SpiralPlan circ = circular_baseline(geo.cov_xy, cfg.search.tol, cfg.search.n_sigma);
    const InsertionResult ins = run_insertion_trial(ell, geo.truth_offset, cfg.search.tol,
                                                    cfg.search.dwell);
    const InsertionResult insc = run_insertion_trial(circ, geo.truth_offset, cfg.search.tol,
                                                     cfg.search.dwell);
    rep.success = ins.success;
    rep.steps = ins.steps;
    rep.seconds = ins.seconds;
    rep.error_m = ins.error_m;
    rep.circular_steps = insc.steps;
    rep.extra["circular_success"] = insc.success;
    rep.extra["circular_seconds"] = insc.seconds;
    if (!ins.success) rep.failure_stage = "search-translation";
  } catch (const std::exception& e) {
    rep.success = false;
    rep.failure_stage = stage + ": " + e.what();
  }
  return rep;
}

TrialReport run_double_pin_scenario(const Config& cfg, std::uint64_t seed, ExecMode mode) {
  (void)mode;
  TrialReport rep;
  rep.scenario = "double-pin";
  rep.seed = seed;
  std::string stage = "setup";
  try {
    if (cfg.scene.objects.size() < 2) throw ConfigError("double-pin needs two objects");
    const Scene scene = Scene::from_spec(cfg.scene);
    const NoiseConfig noise = NoiseConfig::from_spec(cfg.noise);
    const std::string id1 = cfg.scene.objects[0].id;
    const std::string id2 = cfg.scene.objects[1].id;
    const auto& pins = scene.features.at(id1);
    const auto& holes = scene.features.at(id2);
    if (pins.size() < 2 || holes.size() < 2)
      throw ConfigError("double-pin objects need two features each");
    const double lever = (pins[1] - pins[0]).head<2>().norm();
    if (std::abs(lever - (holes[1] - holes[0]).head<2>().norm()) > cfg.search.tol)
      throw ConfigError("pin and hole patterns do not match");

    stage = "perception";
    const RngStream perc(seed, kPerceptionStream);
    const PoseBelief b1 = observe_object(scene, noise, id1, perc.child(0));
    rep.stage_beliefs["perception_static"] = belief_to_json(b1);

    // The grasped object is fully constrained before insertion; its pose in
    // the gripper is exact.
    const PoseBelief b_in_gripper = PoseBelief::exact(Pose::identity());
    const Pose true_in_gripper = Pose::identity();

    stage = "chain";
    const InsertionGeometry geo = insertion_geometry(scene, id1, b1, b_in_gripper,
                                                     true_in_gripper, pins[0], holes[0]);
    rep.stage_beliefs["relative"] = belief_to_json(geo.relative);
    rep.maha2 = mahalanobis2(geo.truth_offset, geo.cov_xy);
    rep.extra["cov_xy"] = mat2_json(geo.cov_xy);

    stage = "search-translation";
    const SpiralPlan ell = elliptical_spiral(geo.cov_xy, cfg.search.tol, cfg.search.n_sigma);
    const InsertionResult ins1 = run_insertion_trial(ell, geo.truth_offset, cfg.search.tol,
                                                     cfg.search.dwell);
    rep.steps = ins1.steps;
    rep.error_m = ins1.error_m;
    if (!ins1.success) {
      rep.success = false;
      rep.failure_stage = "search-translation";
      rep.seconds = ins1.seconds;
      return rep;
    }

    stage = "search-rotation";
    const double sigma_theta = std::sqrt(std::max(geo.relative.cov(2, 2), 1e-18));
    const RotationSweepPlan sweep =
        rotation_sweep(sigma_theta, cfg.search.sweep_k, cfg.search.sweep_step);
    // True residual yaw about the seated pin.
    const Pose rel_true =
        compose(invert(scene.true_pose(id1)), compose(geo.g_ins, true_in_gripper));
    const double theta_star = wrap_angle(yaw_of(rel_true.r));
    const double tol_ang = 2.0 * std::asin(std::min(1.0, cfg.search.tol / (2.0 * lever)));

    long found = -1;
    for (std::size_t k = 0; k < sweep.angles.size(); ++k) {
      if (std::abs(wrap_angle(theta_star + sweep.angles[k])) <= tol_ang) {
        found = static_cast<long>(k) + 1;
        break;
      }
    }
    rep.sweep_steps = found > 0 ? found : static_cast<long>(sweep.angles.size());
    rep.seconds = static_cast<double>(rep.steps + rep.sweep_steps) * cfg.search.dwell;
    rep.extra["sigma_theta"] = sigma_theta;
    rep.extra["theta_star"] = theta_star;
    rep.extra["sweep_bound"] = sweep.bound;
    rep.success = found > 0;
    if (!rep.success) rep.failure_stage = "search-rotation";
  } catch (const std::exception& e) {
    rep.success = false;
    rep.failure_stage = stage + ": " + e.what();
  }
  return rep;
}

TrialReport run_grasp_only_scenario(const Config& cfg, std::uint64_t seed, ExecMode mode) {
  TrialReport rep;
  rep.scenario = "grasp-only";
  rep.seed = seed;
  std::string stage = "setup";
  try {
    if (cfg.scene.objects.empty()) throw ConfigError("grasp-only needs an object");
    const Scene scene = Scene::from_spec(cfg.scene);
    const NoiseConfig noise = NoiseConfig::from_spec(cfg.noise);
    const std::string id = cfg.scene.objects.back().id;

    stage = "perception";
    const RngStream perc(seed, kPerceptionStream);
    const PoseBelief b = observe_object(scene, noise, id, perc.child(0));
    rep.stage_beliefs["perception"] = belief_to_json(b);

    stage = "grasp";
    const GraspStage gs = run_grasp_stage(cfg, scene, noise, id, b, seed, mode);
    rep.stage_beliefs["grasped_in_gripper"] = belief_to_json(gs.object_in_gripper);
    rep.extra["prior_planar"] = planar_belief_json(gs.prior_planar);
    rep.extra["posterior_planar"] = planar_belief_json(gs.posterior_planar);
    rep.extra["encoder_m"] = gs.encoder;

    const Pose rel_true = gs.true_object_in_gripper;
    const PlanarBelief& post = gs.posterior_planar;
    rep.error_m = std::hypot(post.x - rel_true.t.x(), post.y - rel_true.t.y());
    rep.extra["theta_error_rad"] = wrap_angle(post.theta - yaw_of(rel_true.r));
    rep.success = true;
  } catch (const std::exception& e) {
    rep.success = false;
    rep.failure_stage = stage + ": " + e.what();
  }
  return rep;
}

namespace {

// Deterministic jittered probe pattern over the requested box faces.
std::vector<std::pair<Vec3, Vec3>> probe_rays(const Scene& scene, const std::string& id,
                                              const TouchSpec& spec, const RngStream& rng) {
  const Vec3 box = scene.boxes.at(id);
  const Pose& truth = scene.true_pose(id);
  std::vector<std::pair<Vec3, Vec3>> rays;
  std::uint64_t index = 0;
  for (const auto& face : spec.faces) {
    if (face.size() != 2) throw ConfigError("touch.faces entries look like '+z'");
    const double sign = face[0] == '-' ? -1.0 : 1.0;
    const int axis = face[1] == 'x' ? 0 : (face[1] == 'y' ? 1 : 2);
    const int u_axis = (axis + 1) % 3, v_axis = (axis + 2) % 3;
    for (int k = 0; k < spec.per_face; ++k) {
      auto eng = rng.at(index++);
      const double margin = spec.face_margin;
      const double u = uniform(eng, -(0.5 - margin), 0.5 - margin) * box(u_axis);
      const double v = uniform(eng, -(0.5 - margin), 0.5 - margin) * box(v_axis);
      Vec3 p_obj = Vec3::Zero();
      p_obj(axis) = sign * 0.5 * box(axis);
      p_obj(u_axis) = u;
      p_obj(v_axis) = v;
      Vec3 n_obj = Vec3::Zero();
      n_obj(axis) = sign;
      const Vec3 origin = transform_point(truth, p_obj + 0.05 * n_obj);
      const Vec3 dir = truth.r * (-n_obj);
      rays.emplace_back(origin, dir);
    }
  }
  return rays;
}

}  // namespace

TrialReport run_touch_only_scenario(const Config& cfg, std::uint64_t seed, ExecMode mode) {
  TrialReport rep;
  rep.scenario = "touch-only";
  rep.seed = seed;
  std::string stage = "setup";
  try {
    if (cfg.scene.objects.empty()) throw ConfigError("touch-only needs an object");
    const Scene scene = Scene::from_spec(cfg.scene);
    const NoiseConfig noise = NoiseConfig::from_spec(cfg.noise);
    const std::string id = cfg.scene.objects.front().id;
    const Pose& truth = scene.true_pose(id);

    stage = "prior";
    ScalingSeriesParams ss = cfg.touch.series;
    if (ss.plane_constraint) ss.table = scene.table;
    auto eng = RngStream(seed, kPriorStream).at(0);
    Vec6 xi;
    for (int i = 0; i < 3; ++i)
      xi(i) = uniform(eng, -1.0, 1.0) * cfg.touch.prior_offset_scale * ss.delta_init_rot;
    for (int i = 3; i < 6; ++i)
      xi(i) = uniform(eng, -1.0, 1.0) * cfg.touch.prior_offset_scale * ss.delta_init_pos;
    if (ss.plane_constraint) {
      xi(0) = xi(1) = 0.0;
      xi(5) = 0.0;
    }
    PoseBelief prior;
    prior.mean = Pose(exp_so3(xi.head<3>()) * truth.r, truth.t + xi.tail<3>());
    prior.cov.topLeftCorner<3, 3>() =
        std::pow(0.5 * ss.delta_init_rot, 2) * Mat3::Identity();
    prior.cov.bottomRightCorner<3, 3>() =
        std::pow(0.5 * ss.delta_init_pos, 2) * Mat3::Identity();
    rep.stage_beliefs["prior"] = belief_to_json(prior);

    stage = "touch";
    const RngStream touch_rng(seed, kTouchStream);
    const auto rays = probe_rays(scene, id, cfg.touch, touch_rng.child(0));
    std::vector<TouchMeasurement> meas;
    meas.reserve(rays.size());
    for (std::size_t k = 0; k < rays.size(); ++k)
      meas.push_back(simulate_touch(scene, id, rays[k].first, rays[k].second, noise,
                                    touch_rng.child(1), k));

    stage = "localization";
    const auto particles = scaling_series(prior, meas, scene.shapes.at(id), ss,
                                          RngStream(seed, kTouchStream).child(2), mode);
    const PoseBelief posterior = fit_gaussian(particles);
    rep.stage_beliefs["posterior"] = belief_to_json(posterior);

    rep.error_m = (posterior.mean.t - truth.t).norm();
    const double rot_err = rotation_angle(truth.r.transpose() * posterior.mean.r);
    rep.extra["rot_error_rad"] = rot_err;
    rep.extra["n_measurements"] = meas.size();
    rep.extra["n_particles"] = particles.size();
    rep.success = rep.error_m <= cfg.touch.success_pos && rot_err <= cfg.touch.success_rot;
    if (!rep.success) rep.failure_stage = "localization";
  } catch (const std::exception& e) {
    rep.success = false;
    rep.failure_stage = stage + ": " + e.what();
  }
  return rep;
}

TrialReport run_spiral_bench(const Config& cfg, std::uint64_t seed, ExecMode mode) {
  TrialReport rep;
  rep.scenario = "spiral-bench";
  rep.seed = seed;
  try {
    std::vector<Mat2> covs = cfg.search.bench_covs;
    if (covs.empty()) {
      Mat2 iso = Mat2::Zero(), aniso = Mat2::Zero();
      iso.diagonal() << 4e-6, 4e-6;          // 2 mm isotropic
      aniso.diagonal() << 9e-6, 1e-6;        // 9:1 variance anisotropy
      covs = {iso, aniso};
    }
    auto& rows = rep.extra["cases"] = Json::array();
    rep.success = true;
    for (std::size_t i = 0; i < covs.size(); ++i) {
      const Mat2& cov = covs[i];
      const SpiralPlan ell = elliptical_spiral(cov, cfg.search.tol, cfg.search.n_sigma);
      const SpiralPlan circ = circular_baseline(cov, cfg.search.tol, cfg.search.n_sigma);
      const RngStream rng(seed, kSearchStream);
      const SearchCost ce = expected_search_cost(ell, cov, cfg.search.tol,
                                                 static_cast<std::size_t>(cfg.search.bench_n_mc),
                                                 rng.child(2 * i), mode);
      const SearchCost cc = expected_search_cost(circ, cov, cfg.search.tol,
                                                 static_cast<std::size_t>(cfg.search.bench_n_mc),
                                                 rng.child(2 * i), mode);
      Json row;
      row["cov_xy"] = mat2_json(cov);
      row["elliptical_mean_steps"] = ce.mean_steps;
      row["elliptical_std_steps"] = ce.std_steps;
      row["elliptical_success"] = ce.success_rate;
      row["circular_mean_steps"] = cc.mean_steps;
      row["circular_std_steps"] = cc.std_steps;
      row["circular_success"] = cc.success_rate;
      row["elliptical_seconds"] = ce.mean_steps * cfg.search.dwell;
      row["circular_seconds"] = cc.mean_steps * cfg.search.dwell;
      rows.push_back(row);
      rep.seconds += ce.mean_steps * cfg.search.dwell;
    }
  } catch (const std::exception& e) {
    rep.success = false;
    rep.failure_stage = std::string("bench: ") + e.what();
  }
  return rep;
}

std::vector<TrialReport> run_batch(const Config& cfg, ScenarioKind kind, std::uint64_t base_seed,
                                   int count, ExecMode mode) {
  if (count < 1) throw ConfigError("trial count must be >= 1");
  std::vector<TrialReport> reports(static_cast<std::size_t>(count));
  auto run_one = [&](std::size_t i) {
    const std::uint64_t seed = base_seed + i;
    switch (kind) {
      case ScenarioKind::SinglePin: reports[i] = run_single_pin_scenario(cfg, seed, mode); break;
      case ScenarioKind::DoublePin: reports[i] = run_double_pin_scenario(cfg, seed, mode); break;
      case ScenarioKind::GraspOnly: reports[i] = run_grasp_only_scenario(cfg, seed, mode); break;
      case ScenarioKind::TouchOnly: reports[i] = run_touch_only_scenario(cfg, seed, mode); break;
      case ScenarioKind::SpiralBench: reports[i] = run_spiral_bench(cfg, seed, mode); break;
    }
  };
  // Trial-level parallelism for batches; single trials keep the inner
  // kernels parallel instead.
  parallel_for(reports.size(), count > 1 ? mode : ExecMode::Serial, run_one);
  return reports;
}

std::string summary_csv(const std::vector<TrialReport>& reports) {
  std::map<std::string, std::vector<const TrialReport*>> groups;
  for (const auto& r : reports) groups[r.scenario].push_back(&r);
  std::ostringstream out;
  out.precision(12);
  out << "scenario,n,success_rate,mean_s,std_s\n";
  for (const auto& [name, rows] : groups) {
    double succ = 0.0, sum = 0.0, sum2 = 0.0;
    for (const auto* r : rows) {
      succ += r->success ? 1.0 : 0.0;
      sum += r->seconds;
      sum2 += r->seconds * r->seconds;
    }
    const double n = static_cast<double>(rows.size());
    const double mean = sum / n;
    const double var = std::max(sum2 / n - mean * mean, 0.0);
    out << name << ',' << rows.size() << ',' << succ / n << ',' << mean << ',' << std::sqrt(var)
        << '\n';
  }
  return out.str();
}

}  // namespace manip
