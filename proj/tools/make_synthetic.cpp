// Regenerates the noise-free synthetic data sets in data/synthetic from the
// published fit values. Usage: bcim_make_synthetic <output-dir>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "bcim/fitting.hpp"
#include "bcim/text.hpp"

namespace {

using namespace bcim;
using Kind = TrophicForm::Kind;

const std::vector<double> kTumorRatios = {1.25, 2.5, 5, 10, 20, 40};
const std::vector<double> kNkRatios = {0.25, 0.5, 1, 2, 4, 8};

void growth(const std::filesystem::path& path, GrowthModel model, double r, double K, double p0) {
  std::string csv = "# " + std::string(growth_model_name(model)) + " r = " + format_double(r) +
                    ", K = " + format_double(K) + ", p0 = " + format_double(p0) + "\nt_days,cells\n";
  for (int t = 0; t <= 60; t += 4) csv += std::to_string(t) + ',' + format_double(growth_curve(model, p0, r, K, t)) + '\n';
  write_text_file(path, csv);
}

void lysis(const std::filesystem::path& path, const AssayConfig& cfg, const std::vector<double>& ratios) {
  std::string csv = "# " + std::string(assay_name(cfg.kind)) + ", " +
                    std::string(TrophicForm::kind_name(cfg.form.kind())) + " form:";
  for (double c : cfg.form.coefficients()) csv += ' ' + format_double(c);
  csv += ", prey_initial = " + format_double(cfg.prey_initial) + "\nratio,lysis_percent\n";
  for (double x : ratios) csv += format_double(x) + ',' + format_double(100.0 * percent_specific_lysis(cfg, x)) + '\n';
  write_text_file(path, csv);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: bcim_make_synthetic <output-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  try {
    growth(dir / "growth-mda231-logistic.csv", GrowthModel::logistic, 0.16835, 1.03e9, 2e7);
    growth(dir / "growth-cn34brm-gompertz.csv", GrowthModel::gompertz, 0.0513, 1.05e9, 2e7);
    lysis(dir / "lysis-mda231-rational.csv",
          AssayConfig::tumor_assay(2e5, TrophicForm(Kind::rational_hill, {11.2263, 1.33332, 39.222})), kTumorRatios);
    lysis(dir / "lysis-mda453-rational.csv",
          AssayConfig::tumor_assay(4e5, TrophicForm(Kind::rational_hill, {19.6448, 0.8249, 3.85119})), kTumorRatios);
    lysis(dir / "nk-apoptosis-power.csv", AssayConfig::nk_assay(TrophicForm(Kind::power, {2.92131e-6, 0.499502})),
          kNkRatios);
  } catch (const std::exception& e) {
    std::cerr << "bcim_make_synthetic: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
