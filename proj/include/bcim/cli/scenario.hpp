#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bcim/dosing.hpp"
#include "bcim/model.hpp"
#include "bcim/solver.hpp"

namespace bcim::cli {

/// Root of the bundled data tree: $BCIM_DATA_DIR if set, else the build-time path.
[[nodiscard]] std::filesystem::path data_dir();

enum class PresetKind { scenario, params, batch };

/// Existing file path, or a bundled preset of the given kind by name.
[[nodiscard]] std::filesystem::path resolve_preset(const std::string& name_or_path, PresetKind kind);

struct PresetInfo {
  std::string name;
  std::string description;
};
[[nodiscard]] std::vector<PresetInfo> list_presets(PresetKind kind);

/// Parameter set from a file path or bundled preset name.
[[nodiscard]] ModelParameters load_parameters(const std::string& name_or_path);
/// Schedule from "none", "case1".."case5" or a schedule file.
[[nodiscard]] DoseSchedule load_schedule(const std::string& spec, double start = 0.0);

/// A runnable simulation description. Scenario files are `key = value`
/// lines: description, params, ic (E0 | E1 | equilibrium), ic.<component>,
/// param.<name>, schedule, schedule_start, t_start, horizon, and the solver
/// keys rtol, atol_cells, atol_X, max_step, sample_interval, method.
struct ScenarioSpec {
  std::string name;
  std::string description;
  std::string params = "baseline";
  std::string ic = "E1";
  std::vector<std::pair<Component, double>> ic_overrides;
  std::vector<std::pair<Param, double>> param_overrides;
  std::string schedule = "none";
  double schedule_start = 0.0;
  double t_start = 0.0;
  double horizon = 300.0;
  SolverConfig solver{};

  /// Parameters with overrides applied.
  [[nodiscard]] ModelParameters parameters() const;
  /// Initial state for the given parameters (needed for `equilibrium`).
  [[nodiscard]] ModelState initial_state(const ModelParameters& params) const;
  [[nodiscard]] DoseSchedule dose_schedule() const;
  [[nodiscard]] double t_end() const { return t_start + horizon; }
};

[[nodiscard]] ScenarioSpec parse_scenario_text(std::string_view text, const std::string& source = "<scenario>");
[[nodiscard]] ScenarioSpec load_scenario(const std::string& name_or_path);

/// Applies a single `key = value` assignment (same keys as scenario files).
void apply_scenario_setting(ScenarioSpec& spec, std::string_view key, std::string_view value);

/// Ordered (label, scenario) pairs from a batch file of `label = scenario`
/// lines. Duplicate labels are rejected.
[[nodiscard]] std::vector<std::pair<std::string, ScenarioSpec>> load_batch(const std::string& name_or_path);

}  // namespace bcim::cli
