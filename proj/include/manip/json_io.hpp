#pragma once

#include <string>

#include <json.hpp>

#include "manip/belief.hpp"
#include "manip/se3.hpp"

namespace manip {

using Json = nlohmann::json;

// Pose <-> {"r": [9 row-major], "t": [3]}
Json pose_to_json(const Pose& p);
Pose pose_from_json(const Json& j);

// PoseBelief <-> {"mean": Pose, "cov": [36 row-major]}
Json belief_to_json(const PoseBelief& b);
PoseBelief belief_from_json(const Json& j);

// One row per particle: 9 rotation + 3 translation entries, then the weight.
void save_particles_csv(const std::string& path, const ParticleSet<Pose>& particles);
void save_planar_particles_csv(const std::string& path, const ParticleSet<PlanarPose>& particles);

}  // namespace manip
