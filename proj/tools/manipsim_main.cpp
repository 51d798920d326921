#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "manip/parallel.hpp"
#include "manip/scenario.hpp"

namespace fs = std::filesystem;
using namespace manip;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMissingFile = 2;
constexpr int kExitSchema = 3;

int do_validate(const std::string& config_path) {
  if (!fs::exists(config_path)) {
    std::cerr << "config not found: " << config_path << "\n";
    return kExitMissingFile;
  }
  Config cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitSchema;
  }
  const auto diagnostics = validate_config(cfg);
  for (const auto& d : diagnostics) std::cout << d << "\n";
  return diagnostics.empty() ? kExitOk : kExitSchema;
}

void emit_svgs(const std::vector<TrialReport>& reports, const Config& cfg,
               const std::string& out_path) {
  auto cov_from_extra = [](const Json& j) {
    Mat2 m;
    m << j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>();
    return m;
  };
  for (const auto& r : reports) {
    if (r.extra.contains("cov_xy")) {
      const Mat2 cov = cov_from_extra(r.extra.at("cov_xy"));
      const SpiralPlan plan = elliptical_spiral(cov, cfg.search.tol, cfg.search.n_sigma);
      save_plan_svg(out_path + ".spiral.svg", plan, cov);
      return;
    }
    if (r.extra.contains("cases")) {
      int idx = 0;
      for (const auto& row : r.extra.at("cases")) {
        const Mat2 cov = cov_from_extra(row.at("cov_xy"));
        const SpiralPlan plan = elliptical_spiral(cov, cfg.search.tol, cfg.search.n_sigma);
        save_plan_svg(out_path + ".case" + std::to_string(idx++) + ".svg", plan, cov);
      }
      return;
    }
  }
}

int do_run(const std::string& scenario, const std::string& config_path, std::uint64_t seed,
           int trials, const std::string& out_path, bool emit_svg) {
  if (!fs::exists(config_path)) {
    std::cerr << "config not found: " << config_path << "\n";
    return kExitMissingFile;
  }
  Config cfg;
  ScenarioKind kind;
  try {
    cfg = load_config(config_path);
    kind = scenario_from_name(scenario);
    const auto diagnostics = validate_config(cfg);
    if (!diagnostics.empty()) {
      for (const auto& d : diagnostics) std::cerr << d << "\n";
      return kExitSchema;
    }
    if (trials < 1) throw ConfigError("--trials must be >= 1");
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitSchema;
  }

  const auto reports = run_batch(cfg, kind, seed, trials);

  std::ofstream jsonl(out_path);
  if (!jsonl) {
    std::cerr << "cannot open output file: " << out_path << "\n";
    return kExitMissingFile;
  }
  for (const auto& r : reports) jsonl << report_to_json(r).dump() << "\n";
  jsonl.close();

  std::ofstream csv(out_path + ".summary.csv");
  csv << summary_csv(reports);
  csv.close();

  if (emit_svg) emit_svgs(reports, cfg, out_path);

  std::size_t ok = 0;
  for (const auto& r : reports)
    if (r.success) ++ok;
  std::cout << scenario << ": " << ok << "/" << reports.size() << " trials succeeded\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap_from_env();

  CLI::App app{"Pose-uncertainty tracking simulation harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario batch");
  std::string scenario = "single-pin";
  std::string config_path;
  std::string out_path = "report.jsonl";
  std::uint64_t seed = 0;
  int trials = 1;
  bool emit_svg = false;
  run->add_option("--scenario", scenario,
                  "single-pin | double-pin | grasp-only | touch-only | spiral-bench");
  run->add_option("--config", config_path, "Scenario config (JSON)")->required();
  run->add_option("--seed", seed, "Base seed; trial k uses seed + k");
  run->add_option("--trials", trials, "Number of trials");
  run->add_option("--out", out_path, "JSON-lines output path (summary CSV written alongside)");
  run->add_flag("--emit-svg", emit_svg, "Write spiral/ellipse SVG overlays");

  auto* validate = app.add_subcommand("validate", "Validate a config file");
  std::string validate_path;
  validate->add_option("--config", validate_path, "Config to check")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return do_validate(validate_path);
  return do_run(scenario, config_path, seed, trials, out_path, emit_svg);
}
