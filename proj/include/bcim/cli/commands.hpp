#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bcim/cli/scenario.hpp"
#include "bcim/solver.hpp"

namespace bcim::cli {

struct GlobalOptions {
  std::string params;              // overrides the scenario's parameter set when non-empty
  std::filesystem::path out = "out";
  std::size_t jobs = 0;            // 0: available parallelism
  std::uint64_t seed = 20240501;
  bool svg = false;
};

/// Scenario selection shared by simulate, stability, sensitivity and threshold.
struct ScenarioArgs {
  std::string scenario;               // preset name or file; empty for defaults
  std::vector<std::string> settings;  // extra `key=value` scenario assignments
};

[[nodiscard]] ScenarioSpec build_scenario(const GlobalOptions& global, const ScenarioArgs& args,
                                          const std::string& default_preset = {});

/// Runs one scenario and writes trajectory.csv, summary.txt (and
/// trajectory.svg when requested) into dir.
Trajectory simulate_into(const ScenarioSpec& spec, const std::filesystem::path& dir, bool svg);
[[nodiscard]] std::string format_summary(const ScenarioSpec& spec, const Trajectory& traj);

int cmd_simulate(const GlobalOptions& global, const ScenarioArgs& args, std::ostream& out);

struct FitArgs {
  std::string kind;  // growth | lysis | nk-apoptosis
  std::filesystem::path data;
  std::string model = "logistic";
  std::string form = "rational";
  bool all_forms = false;
  bool fix_p0 = false;
  std::optional<double> prey_initial;
  std::string normalization = "treg";  // treg | total
  std::size_t starts = 16;
};
int cmd_fit(const GlobalOptions& global, const FitArgs& args, std::ostream& out);

int cmd_stability(const GlobalOptions& global, const ScenarioArgs& args, std::ostream& out);

struct SensitivityArgs {
  ScenarioArgs scenario;
  double perturbation = 0.01;
};
int cmd_sensitivity(const GlobalOptions& global, const SensitivityArgs& args, std::ostream& out);

struct ThresholdArgs {
  ScenarioArgs scenario;
  double lower = 1e3;
  double upper = 1e11;
  double resolution = 1e4;
};
int cmd_threshold(const GlobalOptions& global, const ThresholdArgs& args, std::ostream& out);

struct StageArgs {
  std::optional<double> cells;
  std::optional<double> diameter_mm;
};
int cmd_stage(const StageArgs& args, std::ostream& out);

int cmd_batch(const GlobalOptions& global, const std::string& batch, std::ostream& out);

int cmd_derive_params(const GlobalOptions& global, const std::string& literature, std::ostream& out);

int cmd_list_presets(std::ostream& out);

}  // namespace bcim::cli
