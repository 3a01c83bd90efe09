#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "bcim/cli/commands.hpp"

namespace {

using namespace bcim::cli;

void add_scenario_options(CLI::App* sub, ScenarioArgs& args) {
  sub->add_option("scenario", args.scenario, "Scenario preset name or file")->envname("BCIM_SCENARIO");
  sub->add_option("--set", args.settings, "Extra scenario setting key=value (repeatable), e.g. ic.T=9.5e6");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Breast cancer immune model: simulation, fitting and analysis"};
  app.require_subcommand(0, 1);
  app.fallthrough();  // global flags may also follow the subcommand

  GlobalOptions global;
  std::string out_dir = global.out.string();
  bool list = false;
  app.add_option("--params", global.params, "Parameter set preset or file (overrides the scenario's)")
      ->envname("BCIM_PARAMS");
  app.add_option("--out", out_dir, "Output directory")->envname("BCIM_OUT")->capture_default_str();
  app.add_option("--jobs", global.jobs, "Worker threads (0: available parallelism)")
      ->envname("BCIM_JOBS")
      ->capture_default_str();
  app.add_option("--seed", global.seed, "Seed for fit multistarts")->envname("BCIM_SEED")->capture_default_str();
  app.add_flag("--svg", global.svg, "Also write SVG line plots")->envname("BCIM_SVG");
  app.add_flag("--list-presets", list, "List bundled scenarios, parameter sets and batches")
      ->envname("BCIM_LIST_PRESETS");

  ScenarioArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Integrate a scenario and write trajectory.csv and summary.txt");
  add_scenario_options(simulate, simulate_args);

  FitArgs fit_args;
  double prey_initial = 0.0;
  auto* fit = app.add_subcommand("fit", "Fit a growth curve or a co-culture lysis curve");
  fit->add_option("kind", fit_args.kind, "growth | lysis | nk-apoptosis")
      ->required()
      ->check(CLI::IsMember({"growth", "lysis", "nk-apoptosis"}));
  fit->add_option("data", fit_args.data, "CSV data file")->required()->envname("BCIM_DATA");
  fit->add_option("--model", fit_args.model, "Growth model: logistic | gompertz")
      ->envname("BCIM_MODEL")
      ->capture_default_str();
  fit->add_option("--form", fit_args.form, "Trophic form: power | rational | michaelis-menten")
      ->envname("BCIM_FORM")
      ->capture_default_str();
  fit->add_flag("--all-forms", fit_args.all_forms, "Fit all three trophic forms and write comparison.csv")
      ->envname("BCIM_ALL_FORMS");
  fit->add_flag("--fix-p0", fit_args.fix_p0, "Hold the growth curve's initial value at the first datum")
      ->envname("BCIM_FIX_P0");
  auto* prey_opt = fit->add_option("--prey-initial", prey_initial, "Initial prey cells in the assay")
                       ->envname("BCIM_PREY_INITIAL")
                       ->check(CLI::PositiveNumber);
  fit->add_option("--normalization", fit_args.normalization, "NK assay normalization: treg | total")
      ->envname("BCIM_NORMALIZATION")
      ->check(CLI::IsMember({"treg", "total"}))
      ->capture_default_str();
  fit->add_option("--starts", fit_args.starts, "Number of multistart points")
      ->envname("BCIM_STARTS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ScenarioArgs stability_args;
  auto* stability = app.add_subcommand("stability", "Zero-tumor equilibrium, eigenvalues and stability verdict");
  add_scenario_options(stability, stability_args);

  SensitivityArgs sensitivity_args;
  auto* sensitivity = app.add_subcommand("sensitivity", "One-at-a-time +/- perturbation scan of all parameters");
  add_scenario_options(sensitivity, sensitivity_args.scenario);
  sensitivity->add_option("--perturbation", sensitivity_args.perturbation, "Relative perturbation")
      ->envname("BCIM_PERTURBATION")
      ->check(CLI::Range(1e-12, 0.99))
      ->capture_default_str();

  ThresholdArgs threshold_args;
  auto* threshold = app.add_subcommand("threshold", "Largest initial tumor the scenario still beats");
  add_scenario_options(threshold, threshold_args.scenario);
  threshold->add_option("--lower", threshold_args.lower, "Initial lower bracket (cells)")
      ->envname("BCIM_LOWER")
      ->capture_default_str();
  threshold->add_option("--upper", threshold_args.upper, "Initial upper bracket (cells)")
      ->envname("BCIM_UPPER")
      ->capture_default_str();
  threshold->add_option("--resolution", threshold_args.resolution, "Bracket width to stop at (cells)")
      ->envname("BCIM_RESOLUTION")
      ->capture_default_str();

  double cells = 0.0, diameter = 0.0;
  auto* stage = app.add_subcommand("stage", "Convert between cell count, diameter and T stage");
  auto* cells_opt = stage->add_option("--cells", cells, "Tumor size in cells")->envname("BCIM_CELLS");
  auto* diam_opt = stage->add_option("--diameter-mm", diameter, "Tumor diameter in mm")->envname("BCIM_DIAMETER_MM");
  cells_opt->excludes(diam_opt);

  std::string batch_name;
  auto* batch = app.add_subcommand("batch", "Run a list of scenarios and write a combined CSV");
  batch->add_option("batch", batch_name, "Batch preset name or file")->required()->envname("BCIM_BATCH");

  std::string literature = "literature";
  auto* derive = app.add_subcommand("derive-params", "Solve the homeostasis conditions for the derived rate constants");
  derive->add_option("literature", literature, "Literature parameter set (preset or file)")
      ->envname("BCIM_LITERATURE")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  global.out = out_dir;

  try {
    if (list) return cmd_list_presets(std::cout);
    if (*simulate) return cmd_simulate(global, simulate_args, std::cout);
    if (*fit) {
      if (*prey_opt) fit_args.prey_initial = prey_initial;
      return cmd_fit(global, fit_args, std::cout);
    }
    if (*stability) return cmd_stability(global, stability_args, std::cout);
    if (*sensitivity) return cmd_sensitivity(global, sensitivity_args, std::cout);
    if (*threshold) return cmd_threshold(global, threshold_args, std::cout);
    if (*stage) {
      StageArgs sa;
      if (*cells_opt) sa.cells = cells;
      if (*diam_opt) sa.diameter_mm = diameter;
      return cmd_stage(sa, std::cout);
    }
    if (*batch) return cmd_batch(global, batch_name, std::cout);
    if (*derive) return cmd_derive_params(global, literature, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "bcim: error: " << e.what() << '\n';
    return 1;
  }
  std::cout << app.help();
  return 0;
}
