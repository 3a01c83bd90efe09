#include "bcim/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

#include "bcim/analysis.hpp"
#include "bcim/clinical.hpp"
#include "bcim/cli/svg.hpp"
#include "bcim/fitting.hpp"
#include "bcim/homeostasis.hpp"
#include "bcim/parallel.hpp"
#include "bcim/parameters_io.hpp"
#include "bcim/text.hpp"

namespace bcim::cli {

namespace fs = std::filesystem;

ScenarioSpec build_scenario(const GlobalOptions& global, const ScenarioArgs& args, const std::string& default_preset) {
  ScenarioSpec spec;
  const std::string& preset = args.scenario.empty() ? default_preset : args.scenario;
  if (!preset.empty()) spec = load_scenario(preset);
  if (spec.name.empty()) spec.name = "custom";
  if (!global.params.empty()) spec.params = global.params;
  for (const auto& s : args.settings) {
    std::string_view key, value;
    if (!split_key_value(s, key, value)) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    apply_scenario_setting(spec, key, value);
  }
  return spec;
}

std::string format_summary(const ScenarioSpec& spec, const Trajectory& traj) {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + '\n'; };
  kv("scenario", spec.name);
  if (!spec.description.empty()) kv("description", spec.description);
  kv("params", spec.params);
  kv("ic", spec.ic);
  kv("schedule", spec.schedule);
  kv("t_start", format_double(traj.times.front()));
  kv("t_end", format_double(traj.times.back()));
  kv("samples", std::to_string(traj.size()));

  const auto final_state = traj.final_state().to_array();
  for (std::size_t i = 0; i < kStateSize; ++i) kv("final." + std::string(kComponentNames[i]), format_double(final_state[i]));
  const StageCategory stage = classify_stage(traj.final_state().T);
  kv("final_stage", std::string(stage.label()));
  kv("final_T_diameter_mm", format_double(cells_to_diameter(traj.final_state().T)));
  kv("tumor_beaten", traj.final_state().T < 1.0 ? "true" : "false");

  for (std::size_t i = 0; i < kStateSize; ++i) {
    double lo = final_state[i], hi = final_state[i], t_lo = traj.times.back(), t_hi = traj.times.back();
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double v = traj.states[k].to_array()[i];
      if (v < lo) lo = v, t_lo = traj.times[k];
      if (v > hi) hi = v, t_hi = traj.times[k];
    }
    const std::string name(kComponentNames[i]);
    kv("min." + name, format_double(lo));
    kv("min_time." + name, format_double(t_lo));
    kv("max." + name, format_double(hi));
    kv("max_time." + name, format_double(t_hi));
  }
  const auto& st = traj.stats;
  kv("solver.method", std::string(method_name(spec.solver.method)));
  kv("solver.rtol", format_double(st.rtol));
  kv("solver.atol_cells", format_double(st.atol_cells));
  kv("solver.atol_X", format_double(st.atol_X));
  kv("solver.accepted_steps", std::to_string(st.accepted_steps));
  kv("solver.rejected_steps", std::to_string(st.rejected_steps));
  kv("solver.stiff_steps", std::to_string(st.stiff_steps));
  kv("solver.rhs_evaluations", std::to_string(st.rhs_evaluations));
  return out;
}

namespace {

std::string trajectory_svg(const ScenarioSpec& spec, const Trajectory& traj) {
  std::vector<Series> series;
  for (std::size_t i = 0; i < kCellComponents; ++i) {
    Series s{std::string(kComponentNames[i]), traj.times, {}};
    for (const auto& st : traj.states) s.y.push_back(st.to_array()[i]);
    series.push_back(std::move(s));
  }
  return svg_log_plot(series, spec.name, "time (days)", "cells");
}

}  // namespace

Trajectory simulate_into(const ScenarioSpec& spec, const fs::path& dir, bool svg) {
  const ModelParameters params = spec.parameters();
  const ModelState ic = spec.initial_state(params);
  const Trajectory traj = integrate(ic, params, spec.dose_schedule(), spec.t_start, spec.t_end(), spec.solver);
  write_trajectory_csv(dir / "trajectory.csv", traj);
  write_text_file(dir / "summary.txt", format_summary(spec, traj));
  if (svg) write_text_file(dir / "trajectory.svg", trajectory_svg(spec, traj));
  return traj;
}

int cmd_simulate(const GlobalOptions& global, const ScenarioArgs& args, std::ostream& out) {
  const ScenarioSpec spec = build_scenario(global, args);
  const Trajectory traj = simulate_into(spec, global.out, global.svg);
  const ModelState& f = traj.final_state();
  out << "scenario " << spec.name << ": t = " << format_double(traj.times.back()) << " days\n";
  out << "final T = " << format_double(f.T) << " (" << classify_stage(f.T).label() << ")"
      << (f.T < 1.0 ? ", tumor beaten" : "") << '\n';
  out << "wrote " << (global.out / "trajectory.csv").string() << " and " << (global.out / "summary.txt").string()
      << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> fit_x_values(const std::vector<LysisDataPoint>& data) {
  std::vector<double> x;
  for (const auto& d : data) x.push_back(d.ratio);
  return x;
}

void print_fit(std::ostream& out, const FitResult& fit) {
  out << fit.model << ":";
  for (std::size_t i = 0; i < fit.names.size(); ++i) out << ' ' << fit.names[i] << '=' << format_double(fit.parameters[i]);
  out << " rss=" << format_double(fit.rss);
  if (!fit.converged) out << " (not converged)";
  if (fit.degenerate) out << " (degenerate)";
  out << '\n';
}

}  // namespace

int cmd_fit(const GlobalOptions& global, const FitArgs& args, std::ostream& out) {
  FitOptions fo;
  fo.starts = args.starts;
  fo.seed = global.seed;
  fo.jobs = global.jobs;

  if (args.kind == "growth") {
    const auto data = read_growth_csv(args.data);
    const auto model = growth_model_from_name(args.model);
    if (!model) throw std::invalid_argument("unknown growth model '" + args.model + "' (logistic, gompertz)");
    GrowthFitOptions go;
    go.fit_initial = !args.fix_p0;
    go.fit = fo;
    const FitResult fit = fit_growth_model(data, *model, go);
    std::vector<GrowthDataPoint> sorted = data;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    std::vector<double> t;
    for (const auto& d : sorted) t.push_back(d.t);
    write_text_file(global.out / ("fit_" + fit.model + ".txt"), format_fit_report(fit));
    write_text_file(global.out / ("residuals_" + fit.model + ".csv"), format_residual_csv(fit, t, "t_days"));
    print_fit(out, fit);
    return fit.converged ? 0 : 2;
  }

  const auto assay = assay_from_name(args.kind);
  if (!assay) throw std::invalid_argument("unknown fit kind '" + args.kind + "' (growth, lysis, nk-apoptosis)");
  const auto data = read_lysis_csv(args.data);

  std::vector<TrophicForm::Kind> forms;
  if (args.all_forms) {
    forms = {TrophicForm::Kind::power, TrophicForm::Kind::rational_hill, TrophicForm::Kind::michaelis_menten};
  } else {
    const auto k = TrophicForm::kind_from_name(args.form);
    if (!k) throw std::invalid_argument("unknown trophic form '" + args.form + "' (power, rational, michaelis-menten)");
    forms = {*k};
  }

  // Fit everything first so a failure leaves no partial output behind.
  std::vector<FitResult> fits;
  for (auto kind : forms) {
    const TrophicForm placeholder(kind, std::vector<double>(TrophicForm::coefficient_count(kind), 1.0));
    AssayConfig cfg = *assay == AssayKind::nk_lyses_tumor ? AssayConfig::tumor_assay(2e5, placeholder)
                                                          : AssayConfig::nk_assay(placeholder);
    if (args.prey_initial) cfg.prey_initial = *args.prey_initial;
    if (args.normalization == "total") cfg.normalization = NkNormalization::total;
    else if (args.normalization != "treg") throw std::invalid_argument("normalization must be treg or total");
    fits.push_back(fit_lysis_curve(data, cfg, fo));
  }

  const auto x = fit_x_values(data);
  std::string comparison = "form,name,value\n";
  bool all_converged = true;
  for (const auto& fit : fits) {
    std::string stem = fit.model;
    std::replace(stem.begin(), stem.end(), '-', '_');
    write_text_file(global.out / ("fit_" + stem + ".txt"), format_fit_report(fit));
    write_text_file(global.out / ("residuals_" + stem + ".csv"), format_residual_csv(fit, x, "ratio"));
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
      comparison += fit.model + ',' + fit.names[i] + ',' + format_double(fit.parameters[i]) + '\n';
    }
    comparison += fit.model + ",rss," + format_double(fit.rss) + '\n';
    print_fit(out, fit);
    all_converged = all_converged && fit.converged;
  }
  if (args.all_forms) write_text_file(global.out / "comparison.csv", comparison);
  return all_converged ? 0 : 2;
}

// ---------------------------------------------------------------------------

int cmd_stability(const GlobalOptions& global, const ScenarioArgs& args, std::ostream& out) {
  const ScenarioSpec spec = build_scenario(global, args);
  const StabilityReport rep = stability_report(spec.parameters());
  const std::string text = format_stability_report(rep);
  write_text_file(global.out / "stability.txt", text);
  out << text;
  return 0;
}

int cmd_sensitivity(const GlobalOptions& global, const SensitivityArgs& args, std::ostream& out) {
  const ScenarioSpec spec = build_scenario(global, args.scenario, "sensitivity-baseline");
  const ModelParameters params = spec.parameters();
  SensitivityOptions so;
  so.perturbation = args.perturbation;
  so.schedule = spec.dose_schedule();
  so.solver = spec.solver;
  so.jobs = global.jobs;
  const SensitivityReport rep = sensitivity_scan(params, spec.initial_state(params), spec.horizon, so);
  write_text_file(global.out / "sensitivity.csv", format_sensitivity_csv(rep));
  out << "baseline T(" << format_double(rep.horizon) << ") = " << format_double(rep.baseline_final_tumor) << '\n';
  out << std::left << std::setw(10) << "parameter" << std::right << std::setw(14) << "+pct" << std::setw(14) << "-pct"
      << '\n';
  for (const auto& e : rep.ranked()) {
    out << std::left << std::setw(10) << param_name(e.param) << std::right << std::setw(14)
        << format_double(std::round(e.plus_pct * 1e4) / 1e4) << std::setw(14)
        << format_double(std::round(e.minus_pct * 1e4) / 1e4) << '\n';
  }
  return 0;
}

int cmd_threshold(const GlobalOptions& global, const ThresholdArgs& args, std::ostream& out) {
  const ScenarioSpec spec = build_scenario(global, args.scenario);
  const ModelParameters params = spec.parameters();
  ThresholdOptions to;
  to.horizon = spec.horizon;
  to.lower = args.lower;
  to.upper = args.upper;
  to.resolution = args.resolution;
  to.solver = spec.solver;
  to.jobs = global.jobs;
  const ThresholdResult res = max_beatable_tumor(params, spec.initial_state(params), spec.dose_schedule(), to);

  std::string probes = "initial_T,final_T,beaten\n";
  for (const auto& p : res.probes) {
    probes += format_double(p.initial_tumor) + ',' + format_double(p.final_tumor) + ',' + (p.beaten ? "1" : "0") + '\n';
  }
  std::string text;
  text += "scenario = " + spec.name + '\n';
  text += "horizon = " + format_double(spec.horizon) + '\n';
  text += "beaten_at = " + format_double(res.beaten) + '\n';
  text += "persists_at = " + format_double(res.survives) + '\n';
  text += "threshold = " + format_double(res.threshold) + '\n';
  text += "threshold_stage = " + std::string(classify_stage(res.threshold).label()) + '\n';
  text += "probes = " + std::to_string(res.probes.size()) + '\n';
  write_text_file(global.out / "threshold.txt", text);
  write_text_file(global.out / "threshold_probes.csv", probes);
  out << text;
  return 0;
}

int cmd_stage(const StageArgs& args, std::ostream& out) {
  if (args.cells.has_value() == args.diameter_mm.has_value()) {
    throw std::invalid_argument("give exactly one of --cells or --diameter-mm");
  }
  const double cells = args.cells ? *args.cells : diameter_to_cells(*args.diameter_mm);
  const StageCategory cat = classify_stage(cells);
  out << "cells = " << format_double(cells) << '\n';
  out << "diameter_mm = " << format_double(cells_to_diameter(cells)) << '\n';
  out << "volume_mm3 = " << format_double(cells_to_volume(cells)) << '\n';
  out << "stage = " << cat.label() << (cat.t1 ? " (T1)" : "") << '\n';
  out << "range = [" << format_double(cat.lo) << ", " << format_double(cat.hi) << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_batch(const GlobalOptions& global, const std::string& batch, std::ostream& out) {
  auto cases = load_batch(batch);
  if (!global.params.empty()) {
    for (auto& [label, spec] : cases) spec.params = global.params;
  }
  std::vector<std::optional<Trajectory>> results(cases.size());
  std::vector<std::string> errors(cases.size());
  parallel_for(cases.size(), global.jobs, [&](std::size_t i) {
    try {
      results[i] = simulate_into(cases[i].second, global.out / cases[i].first, global.svg);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::string combined = "case,t,series,value\n";
  int status = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string& label = cases[i].first;
    if (!results[i]) {
      out << label << ": FAILED: " << errors[i] << '\n';
      status = 1;
      continue;
    }
    const Trajectory& tr = *results[i];
    for (Component c : {Component::T, Component::B, Component::B_T}) {
      const std::string series(kComponentNames[static_cast<std::size_t>(c)]);
      for (std::size_t k = 0; k < tr.size(); ++k) {
        combined += label + ',' + format_double(tr.times[k]) + ',' + series + ',' + format_double(tr.states[k][c]) + '\n';
      }
    }
    out << label << ": final T = " << format_double(tr.final_state().T) << ", final B = "
        << format_double(tr.final_state().B) << '\n';
  }
  write_text_file(global.out / "combined.csv", combined);
  if (global.svg) {
    std::vector<Series> series;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      if (!results[i]) continue;
      Series s{cases[i].first + " T", results[i]->times, {}};
      for (const auto& st : results[i]->states) s.y.push_back(st.T);
      series.push_back(std::move(s));
    }
    write_text_file(global.out / "combined_T.svg", svg_log_plot(series, "tumor by case", "time (days)", "cells"));
  }
  out << "wrote " << (global.out / "combined.csv").string() << '\n';
  return status;
}

int cmd_derive_params(const GlobalOptions& global, const std::string& literature, std::ostream& out) {
  const auto path = resolve_preset(literature, PresetKind::params);
  const PartialParameters lit = read_parameter_file(path);
  const DerivedParameters derived = derive_parameters(zero_tumor_state(), high_tumor_state(), lit);
  const ModelParameters printed = table_parameters();

  out << std::left << std::setw(10) << "parameter" << std::setw(24) << "derived" << std::setw(12) << "table"
      << "rel_diff\n";
  for (const auto& [p, v] : derived.entries()) {
    const double ref = printed[p];
    out << std::left << std::setw(10) << param_name(p) << std::setw(24) << format_double(v) << std::setw(12)
        << format_double(ref) << format_double(std::round((v - ref) / ref * 1e6) / 1e6) << '\n';
  }
  const PartialParameters full = derived.merged_into(lit);
  const fs::path target = global.out / "derived.params";
  write_text_file(target, format_parameters(full, "Literature values from " + path.filename().string() +
                                                      "\nwith homeostasis-derived values at full precision"));
  out << "wrote " << target.string() << '\n';
  return 0;
}

int cmd_list_presets(std::ostream& out) {
  auto section = [&](const char* title, PresetKind kind) {
    out << title << ":\n";
    for (const auto& p : list_presets(kind)) {
      out << "  " << std::left << std::setw(28) << p.name << p.description << '\n';
    }
  };
  section("scenarios", PresetKind::scenario);
  section("parameter sets", PresetKind::params);
  section("batches", PresetKind::batch);
  out << "schedules:\n";
  for (int k = 1; k <= 5; ++k) out << "  case" << k << std::string(23, ' ') << preset_description(k) << '\n';
  return 0;
}

}  // namespace bcim::cli
