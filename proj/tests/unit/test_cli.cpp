#include <doctest.h>

#include <map>
#include <sstream>

#include "bcim/cli/commands.hpp"
#include "bcim/cli/scenario.hpp"
#include "bcim/cli/svg.hpp"
#include "bcim/fitting.hpp"
#include "bcim/homeostasis.hpp"
#include "bcim/parameters_io.hpp"
#include "bcim/text.hpp"
#include "support.hpp"

using namespace bcim;
using namespace bcim::cli;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::map<std::string, std::string> out;
  const std::string text = read_text_file(path);
  for (std::string_view line : split(text, '\n')) {
    std::string_view k, v;
    if (split_key_value(line, k, v)) out[std::string(k)] = std::string(v);
  }
  return out;
}

double number_at(const std::map<std::string, std::string>& kv, const std::string& key) {
  REQUIRE(kv.count(key) == 1);
  double v = 0.0;
  REQUIRE(parse_double(kv.at(key), v));
  return v;
}

GlobalOptions options_for(const fs::path& out) {
  GlobalOptions g;
  g.out = out;
  g.jobs = 2;
  return g;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("bundled parameter sets match the built-in values") {
  CHECK(load_parameters("table") == table_parameters());
  CHECK(load_parameters("baseline") == baseline_parameters());
  const PartialParameters lit = read_parameter_file(resolve_preset("literature", PresetKind::params));
  for (Param p : all_params()) CHECK(lit.find(p) == table_literature_parameters().find(p));
}

TEST_CASE("bundled synthetic data match their generators") {
  using Kind = TrophicForm::Kind;
  const fs::path dir = data_dir() / "synthetic";
  const auto check_lysis = [](const fs::path& file, const AssayConfig& c) {
    for (const auto& d : read_lysis_csv(file)) CHECK(d.fraction == doctest::Approx(percent_specific_lysis(c, d.ratio)).epsilon(1e-12));
  };
  check_lysis(dir / "lysis-mda231-rational.csv",
              AssayConfig::tumor_assay(2e5, TrophicForm(Kind::rational_hill, {11.2263, 1.33332, 39.222})));
  check_lysis(dir / "lysis-mda453-rational.csv",
              AssayConfig::tumor_assay(4e5, TrophicForm(Kind::rational_hill, {19.6448, 0.8249, 3.85119})));
  check_lysis(dir / "nk-apoptosis-power.csv", AssayConfig::nk_assay(TrophicForm(Kind::power, {2.92131e-6, 0.499502})));
  for (const auto& d : read_growth_csv(dir / "growth-mda231-logistic.csv")) {
    CHECK(d.cells == doctest::Approx(growth_curve(GrowthModel::logistic, 2e7, 0.16835, 1.03e9, d.t)).epsilon(1e-12));
  }
  for (const auto& d : read_growth_csv(dir / "growth-cn34brm-gompertz.csv")) {
    CHECK(d.cells == doctest::Approx(growth_curve(GrowthModel::gompertz, 2e7, 0.0513, 1.05e9, d.t)).epsilon(1e-12));
  }
}

TEST_CASE("scenario files") {
  const ScenarioSpec s = parse_scenario_text(
      "# test\nic = E0\nic.T = 5e6\nparam.c = 19\nschedule = case2\nschedule_start = 3\nhorizon = 40\nrtol = 1e-9\n"
      "method = stiff\n");
  CHECK(s.ic == "E0");
  CHECK(s.horizon == 40.0);
  CHECK(s.solver.rtol == 1e-9);
  CHECK(s.solver.method == SolverConfig::Method::stiff);
  CHECK(s.parameters()[Param::c] == 19.0);
  const ModelState ic = s.initial_state(s.parameters());
  CHECK(ic.T == 5e6);
  CHECK(ic.N == zero_tumor_state()[Component::N]);
  CHECK(s.dose_schedule() == preset_schedule(2, 3.0));

  CHECK_THROWS_WITH(parse_scenario_text("horizon = 4\ncolour = red\n", "x.scenario"), doctest::Contains("x.scenario:2"));
  CHECK_THROWS_WITH(parse_scenario_text("ic.Q = 1\n"), doctest::Contains("unknown state component"));
  CHECK_THROWS_WITH(parse_scenario_text("param.zeta = 1\n"), doctest::Contains("unknown parameter"));
  CHECK_THROWS(parse_scenario_text("horizon = soon\n"));
  CHECK_THROWS(load_scenario("no-such-scenario"));

  ScenarioSpec eq;
  eq.ic = "equilibrium";
  CHECK(eq.initial_state(eq.parameters()).N == doctest::Approx(3.38e9).epsilon(1e-3));
}

TEST_CASE("every bundled preset loads") {
  const auto scenarios = list_presets(PresetKind::scenario);
  CHECK(scenarios.size() >= 10);
  for (const auto& p : scenarios) {
    CAPTURE(p.name);
    CHECK_FALSE(p.description.empty());
    const ScenarioSpec s = load_scenario(p.name);
    CHECK_NOTHROW((void)s.initial_state(s.parameters()));
    CHECK_NOTHROW((void)s.dose_schedule());
  }
  for (const auto& p : list_presets(PresetKind::batch)) CHECK_NOTHROW((void)load_batch(p.name));
  std::ostringstream os;
  cmd_list_presets(os);
  for (const auto& p : scenarios) CHECK(os.str().find(p.name) != std::string::npos);
}

TEST_CASE("simulate") {
  const fs::path dir = test::scratch_dir("simulate");
  std::ostringstream os;
  GlobalOptions g = options_for(dir / "a");
  g.svg = true;
  REQUIRE(cmd_simulate(g, {"hightumor-settling", {}}, os) == 0);
  const auto kv = read_key_values(dir / "a" / "summary.txt");
  CHECK(number_at(kv, "final.T") == doctest::Approx(9.97e9).epsilon(0.01));
  CHECK(kv.at("final_stage") == "T2");
  CHECK(number_at(kv, "max.T") >= number_at(kv, "final.T"));
  CHECK(fs::exists(dir / "a" / "trajectory.svg"));

  // Byte-identical on a second run.
  REQUIRE(cmd_simulate(options_for(dir / "b"), {"hightumor-settling", {}}, os) == 0);
  CHECK(read_text_file(dir / "a" / "trajectory.csv") == read_text_file(dir / "b" / "trajectory.csv"));
  CHECK(read_text_file(dir / "a" / "summary.txt") == read_text_file(dir / "b" / "summary.txt"));

  REQUIRE(cmd_simulate(options_for(dir / "c"), {"standard-dose", {}}, os) == 0);
  const auto dosed = read_key_values(dir / "c" / "summary.txt");
  CHECK(number_at(dosed, "final.T") < 1.0);
  CHECK(dosed.at("tumor_beaten") == "true");

  REQUIRE(cmd_simulate(options_for(dir / "d"), {"hightumor-settling", {"horizon=0"}}, os) == 0);
  const std::string csv = read_text_file(dir / "d" / "trajectory.csv");
  CHECK(csv == "t,T,N,C,H,R,B,B_T,X\n0,1e+10,1.25e+09,2634000,2556210000,508790000,7.67e+08,33400000,0\n");

  CHECK_THROWS(cmd_simulate(options_for(dir / "e"), {"hightumor-settling", {"bogus"}}, os));
  CHECK_FALSE(fs::exists(dir / "e"));
}

TEST_CASE("global parameter override") {
  const fs::path dir = test::scratch_dir("override");
  std::ostringstream os;
  GlobalOptions g = options_for(dir);
  g.params = "table";
  const ScenarioSpec s = build_scenario(g, {"hightumor-settling", {"param.a=0.2"}});
  CHECK(s.params == "table");
  CHECK(s.parameters()[Param::a] == 0.2);
  CHECK(s.parameters()[Param::kappa] == 1.63e-11);
}

TEST_CASE("fit") {
  const fs::path dir = test::scratch_dir("fit");
  const fs::path data = data_dir() / "synthetic";
  std::ostringstream os;

  FitArgs growth{"growth", data / "growth-mda231-logistic.csv"};
  REQUIRE(cmd_fit(options_for(dir / "g"), growth, os) == 0);
  const auto g = read_key_values(dir / "g" / "fit_logistic.txt");
  CHECK(number_at(g, "r") == doctest::Approx(0.16835).epsilon(0.01));
  CHECK(number_at(g, "K") == doctest::Approx(1.03e9).epsilon(0.01));
  CHECK(fs::exists(dir / "g" / "residuals_logistic.csv"));

  FitArgs lysis{"lysis", data / "lysis-mda453-rational.csv"};
  lysis.form = "rational";
  REQUIRE(cmd_fit(options_for(dir / "l"), lysis, os) == 0);
  const auto l = read_key_values(dir / "l" / "fit_rational.txt");
  CHECK(number_at(l, "c") == doctest::Approx(19.6448).epsilon(0.01));
  CHECK(number_at(l, "delta") == doctest::Approx(0.8249).epsilon(0.01));
  CHECK(number_at(l, "s_N") == doctest::Approx(3.85119).epsilon(0.01));

  FitArgs all{"lysis", data / "lysis-mda453-rational.csv"};
  all.all_forms = true;
  all.prey_initial = 4e5;
  cmd_fit(options_for(dir / "all"), all, os);
  const std::string cmp = read_text_file(dir / "all" / "comparison.csv");
  for (const char* form : {"power,", "rational,", "michaelis-menten,"}) CHECK(cmp.find(form) != std::string::npos);

  FitArgs missing{"growth", dir / "absent.csv"};
  CHECK_THROWS(cmd_fit(options_for(dir / "m"), missing, os));
  CHECK_FALSE(fs::exists(dir / "m"));

  FitArgs unknown{"lysis", data / "lysis-mda453-rational.csv"};
  unknown.form = "cubic";
  CHECK_THROWS_WITH(cmd_fit(options_for(dir / "u"), unknown, os), doctest::Contains("cubic"));
}

TEST_CASE("batch") {
  const fs::path dir = test::scratch_dir("batch");
  std::ostringstream os;
  REQUIRE(cmd_batch(options_for(dir / "five"), "dose-cases", os) == 0);
  const std::string combined = read_text_file(dir / "five" / "combined.csv");
  CHECK(combined.rfind("case,t,series,value\n", 0) == 0);
  for (int k = 1; k <= 5; ++k) {
    const std::string label = "case" + std::to_string(k);
    CHECK(fs::exists(dir / "five" / label / "trajectory.csv"));
    for (const char* series : {",T,", ",B,", ",B_T,"}) {
      CHECK(combined.find("\n" + label + ",0" + series) != std::string::npos);
    }
  }
  CHECK(combined.find(",N,") == std::string::npos);

  // One case: identical to simulate plus the combined file.
  write_text_file(dir / "one.batch", "only = " + (data_dir() / "scenarios" / "dose-case4.scenario").string() + "\n");
  REQUIRE(cmd_batch(options_for(dir / "one"), (dir / "one.batch").string(), os) == 0);
  REQUIRE(cmd_simulate(options_for(dir / "sim"), {"dose-case4", {}}, os) == 0);
  CHECK(read_text_file(dir / "one" / "only" / "trajectory.csv") == read_text_file(dir / "sim" / "trajectory.csv"));
  CHECK(fs::exists(dir / "one" / "combined.csv"));

  write_text_file(dir / "dup.batch", "x = dose-case1\ny = dose-case2\nx = dose-case3\n");
  CHECK_THROWS_WITH(cmd_batch(options_for(dir / "dup"), (dir / "dup.batch").string(), os),
                    doctest::Contains("duplicate"));
  CHECK_FALSE(fs::exists(dir / "dup"));

  // A failing case is reported while the others complete.
  write_text_file(dir / "bad.scenario", "ic = E1\nhorizon = 30\nrtol = -1\n");
  write_text_file(dir / "mixed.batch", "good = dose-case1\nbad = " + (dir / "bad.scenario").string() + "\n");
  std::ostringstream mixed;
  CHECK(cmd_batch(options_for(dir / "mixed"), (dir / "mixed.batch").string(), mixed) != 0);
  CHECK(mixed.str().find("bad: FAILED") != std::string::npos);
  CHECK(fs::exists(dir / "mixed" / "good" / "trajectory.csv"));
}

TEST_CASE("analysis commands") {
  const fs::path dir = test::scratch_dir("analysis");
  std::ostringstream os;
  REQUIRE(cmd_stability(options_for(dir), {}, os) == 0);
  CHECK(os.str().find("verdict = locally asymptotically stable") != std::string::npos);
  CHECK(fs::exists(dir / "stability.txt"));

  std::ostringstream th;
  REQUIRE(cmd_threshold(options_for(dir), {{"threshold-compromised", {}}}, th) == 0);
  const auto kv = read_key_values(dir / "threshold.txt");
  CHECK(number_at(kv, "threshold") == doctest::Approx(9.17e6).epsilon(0.02));
  CHECK(kv.at("threshold_stage") == "T1a");

  std::ostringstream st;
  REQUIRE(cmd_stage({std::nullopt, 10.0}, st) == 0);
  CHECK(st.str().find("stage = T1c") != std::string::npos);
  CHECK_THROWS(cmd_stage({1e6, 10.0}, st));
  CHECK_THROWS(cmd_stage({}, st));

  std::ostringstream dp;
  REQUIRE(cmd_derive_params(options_for(dir), "literature", dp) == 0);
  CHECK(ModelParameters(read_parameter_file(dir / "derived.params")) == baseline_parameters());
}

TEST_CASE("svg plot") {
  const std::string svg = svg_log_plot({{"T", {0, 1, 2}, {1e3, 1e6, 0.0}}, {"a<b", {0, 2}, {10, 100}}}, "t", "x", "y");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("a&lt;b") != std::string::npos);
  CHECK(svg.find("1e6") != std::string::npos);
}

}  // TEST_SUITE
