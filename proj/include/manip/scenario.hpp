#pragma once

#include <string>
#include <vector>

#include "manip/sim_world.hpp"

namespace manip {

enum class ScenarioKind { SinglePin, DoublePin, GraspOnly, TouchOnly, SpiralBench };

ScenarioKind scenario_from_name(const std::string& name);
std::string scenario_name(ScenarioKind kind);

struct TrialReport {
  std::string scenario;
  std::uint64_t seed = 0;
  bool success = false;
  std::string failure_stage;  // empty unless a stage failed
  long steps = 0;             // translation-search steps
  long sweep_steps = 0;       // rotation-sweep steps (double pin)
  double seconds = 0.0;
  double error_m = 0.0;       // residual position error at termination
  double maha2 = 0.0;         // squared Mahalanobis of the true offset under the reported cov
  long circular_steps = 0;    // paired circular-spiral baseline
  Json stage_beliefs = Json::object();
  Json extra = Json::object();
};

Json report_to_json(const TrialReport& r);

TrialReport run_single_pin_scenario(const Config& cfg, std::uint64_t seed,
                                    ExecMode mode = ExecMode::Parallel);
TrialReport run_double_pin_scenario(const Config& cfg, std::uint64_t seed,
                                    ExecMode mode = ExecMode::Parallel);
TrialReport run_grasp_only_scenario(const Config& cfg, std::uint64_t seed,
                                    ExecMode mode = ExecMode::Parallel);
TrialReport run_touch_only_scenario(const Config& cfg, std::uint64_t seed,
                                    ExecMode mode = ExecMode::Parallel);
TrialReport run_spiral_bench(const Config& cfg, std::uint64_t seed,
                             ExecMode mode = ExecMode::Parallel);

/// Runs `count` trials at seeds base, base+1, ...; trial-level parallelism
/// with reports ordered by seed.
std::vector<TrialReport> run_batch(const Config& cfg, ScenarioKind kind, std::uint64_t base_seed,
                                   int count, ExecMode mode = ExecMode::Parallel);

/// Summary row per scenario: scenario, n, success_rate, mean_s, std_s.
std::string summary_csv(const std::vector<TrialReport>& reports);

}  // namespace manip
