#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "manip/json_io.hpp"
#include "manip/se3.hpp"
#include "manip/touch.hpp"

namespace manip {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ObjectSpec {
  std::string id;
  Pose pose;                  // true pose, base frame
  Vec3 box = Vec3::Zero();    // box dimensions (x, y, z), m
  std::vector<Vec3> features; // pin/hole mouths, object frame
};

struct SceneSpec {
  Pose table;
  Pose camera;
  std::vector<ObjectSpec> objects;
};

struct NoiseSpec {
  double cam_rot_sigma = 8.7e-3;    // rad
  double cam_trans_sigma = 1e-3;    // m
  double obj_rot_sigma = 1.2e-2;    // rad
  double obj_trans_sigma = 8e-4;    // m
  double encoder_sigma = 3e-4;      // m
  double touch_pos_sigma = 5e-4;    // m
  double touch_nor_sigma = 8.7e-2;  // rad
  bool robot_positioning_negligible = true;
  std::optional<Mat6> cam_cov_override;  // full 6x6, replaces the diagonal build
  std::optional<Mat6> obj_cov_override;
};

struct GraspSpec {
  double closing_step = 1e-4;
  double max_opening = 0.085;
  double sigma_d = 3e-4;
  double penetration_tol = 1e-9;
  int particles = 2000;
};

struct TouchSpec {
  ScalingSeriesParams series;
  std::vector<std::string> faces = {"+z", "+x", "+y"};
  int per_face = 7;
  double face_margin = 0.15;       // fraction of the face kept clear at the rim
  double prior_offset_scale = 0.5; // prior mean error as a fraction of delta_init
  double success_pos = 1.5e-3;     // m
  double success_rot = 2.6e-2;     // rad
};

struct SearchSpec {
  double tol = 5e-4;      // m
  double n_sigma = 4.0;
  double dwell = 0.05;    // s per waypoint
  double sweep_k = 4.0;
  double sweep_step = 1e-2;  // rad
  std::vector<Mat2> bench_covs;  // spiral-bench cases; defaults supplied when empty
  int bench_n_mc = 10000;
};

struct TrialsSpec {
  int count = 50;
  std::uint64_t base_seed = 12345;
};

struct Config {
  SceneSpec scene;
  NoiseSpec noise;
  GraspSpec grasp;
  TouchSpec touch;
  SearchSpec search;
  TrialsSpec trials;
};

Config config_from_json(const Json& j);

// Throws ConfigError on missing file or parse failure.
Config load_config(const std::string& path);

// Schema and invariant checks; empty list means valid.
std::vector<std::string> validate_config(const Config& c);

}  // namespace manip
