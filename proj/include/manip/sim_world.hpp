#pragma once

#include <map>
#include <optional>
#include <string>

#include "manip/belief.hpp"
#include "manip/config.hpp"
#include "manip/grasp.hpp"
#include "manip/polygon.hpp"
#include "manip/shape.hpp"
#include "manip/spiral.hpp"
#include "manip/touch.hpp"

namespace manip {

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ground-truth scene: true object poses, table, camera, shapes, and the
/// pin/hole feature offsets used by the insertion tasks.
struct Scene {
  Pose table;
  Pose camera_truth;
  std::map<std::string, Pose> true_poses;
  std::map<std::string, ShapeModel> shapes;
  std::map<std::string, ConvexPolygon> cross_sections;  // grasp footprint
  std::map<std::string, std::vector<Vec3>> features;
  std::map<std::string, Vec3> boxes;

  static Scene from_spec(const SceneSpec& spec);
  const Pose& true_pose(const std::string& id) const;
};

/// Zero-mean perturbation beliefs for the two perception-stage sources plus
/// the interaction-stage sensor noises. Robot positioning error is modeled as
/// exactly zero.
struct NoiseConfig {
  PoseBelief cam_belief;   // hand-eye uncertainty (identity mean)
  PoseBelief meas_belief;  // object-in-camera uncertainty (identity mean)
  double encoder_sigma = 3e-4;
  double touch_pos_sigma = 5e-4;
  double touch_nor_sigma = 8.7e-2;
  bool robot_positioning_negligible = true;

  static NoiseConfig from_spec(const NoiseSpec& spec);
};

/// One left-perturbed draw of `mean` under `cov`.
Pose sample_pose(const Pose& mean, const Mat6& cov, std::mt19937_64& eng);

/// One noisy camera observation of an object: draws the camera pose and the
/// object-in-camera pose from their beliefs around truth and returns the
/// composed belief, so the mean is the noisy estimate and the covariance is
/// the propagated chain covariance.
PoseBelief observe_object(const Scene& scene, const NoiseConfig& noise, const std::string& id,
                          const RngStream& rng);

/// Post-grasp finger distance: simulate_grasp on the true object pose in the
/// gripper frame plus encoder noise, clamped to [0, max_opening].
double simulate_encoder(const Scene& scene, const GraspParams& g, const std::string& id,
                        const Pose& gripper, const NoiseConfig& noise, const RngStream& rng);

/// First ray hit on the true surface, corrupted by position noise and a
/// random tilt of the normal. Throws SimError when the ray misses.
TouchMeasurement simulate_touch(const Scene& scene, const std::string& id, const Vec3& origin,
                                const Vec3& dir, const NoiseConfig& noise, const RngStream& rng,
                                std::uint64_t index);

struct InsertionResult {
  bool success = false;
  long steps = 0;
  double seconds = 0.0;
  double error_m = 0.0;  // distance from the terminating waypoint to the true offset
};

/// Walks the plan from the believed insertion point; succeeds at the first
/// waypoint within tol of the true hole offset.
InsertionResult run_insertion_trial(const SpiralPlan& plan, const Vec2& truth_offset, double tol,
                                    double dwell);

}  // namespace manip
