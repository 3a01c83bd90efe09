#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bcim/model.hpp"

namespace bcim {

// ---------------------------------------------------------------------------
// Co-culture assays

enum class AssayKind { nk_lyses_tumor, treg_kills_nk };

/// How the Treg->NK assay turns surviving NK cells into a kill fraction.
///   treg_attributable: (N_ctrl - N(tf)) / N_ctrl, N_ctrl = N_E e^{-theta_NE tf}
///   total:             (N_E - N(tf)) / N_E
enum class NkNormalization { treg_attributable, total };

inline constexpr double kInVitroNkDeathRate = 0.7414;    // day^-1
inline constexpr double kInVitroTregDeathRate = 0.1985;  // day^-1
inline constexpr double kTumorAssayHours = 5.0;
inline constexpr double kNkAssayHours = 16.0;
inline constexpr double kNkAssayInitialCells = 5e9;

struct AssayConfig {
  AssayKind kind = AssayKind::nk_lyses_tumor;
  double prey_initial = 2e5;
  double predator_decay = kInVitroNkDeathRate;
  double prey_decay = 0.0;
  double duration = kTumorAssayHours / 24.0;
  TrophicForm form{TrophicForm::Kind::power, {0.0, 1.0}};
  NkNormalization normalization = NkNormalization::treg_attributable;

  void validate() const;  // throws std::invalid_argument
  [[nodiscard]] AssayConfig with_coefficients(std::vector<double> coefficients) const;

  /// NK cells lysing T_E tumor cells for five hours.
  [[nodiscard]] static AssayConfig tumor_assay(double tumor_initial, TrophicForm form);
  /// Tregs killing 5e9 NK cells over sixteen hours.
  [[nodiscard]] static AssayConfig nk_assay(TrophicForm form);
};

[[nodiscard]] std::string_view assay_name(AssayKind kind);
[[nodiscard]] std::optional<AssayKind> assay_from_name(std::string_view name);

/// Fraction of prey killed by predation at the given predator:prey ratio.
/// Throws IntegrationError-like std::runtime_error when the assay ODE fails.
[[nodiscard]] double percent_specific_lysis(const AssayConfig& config, double ratio);

// ---------------------------------------------------------------------------
// Data

struct GrowthDataPoint {
  double t;      // days
  double cells;
};

struct LysisDataPoint {
  double ratio;     // predator : prey
  double fraction;  // in [0, 1]
};

/// `t_days,cells` or `t_days,volume_mm3` (volumes converted to cells).
[[nodiscard]] std::vector<GrowthDataPoint> parse_growth_csv(std::string_view text, const std::string& source = "<text>");
[[nodiscard]] std::vector<GrowthDataPoint> read_growth_csv(const std::filesystem::path& path);
/// `ratio,lysis_percent`; percentages are converted to fractions.
[[nodiscard]] std::vector<LysisDataPoint> parse_lysis_csv(std::string_view text, const std::string& source = "<text>");
[[nodiscard]] std::vector<LysisDataPoint> read_lysis_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Least squares

struct FitResult {
  std::string model;                    // e.g. "rational" or "logistic"
  std::vector<std::string> names;       // coefficient names
  std::vector<double> parameters;
  std::vector<double> observed;
  std::vector<double> predicted;
  std::vector<double> residuals;        // predicted - observed
  double rss = 0.0;
  bool converged = false;
  bool degenerate = false;              // data cannot pin down every coefficient
  std::size_t starts = 0;
  std::size_t converged_starts = 0;
  std::size_t iterations = 0;           // of the winning start
  std::size_t best_start = 0;

  [[nodiscard]] double parameter(std::string_view name) const;
};

using ResidualFunction = std::function<bool(const std::vector<double>& x, std::vector<double>& residuals)>;

struct LmOptions {
  std::size_t max_iterations = 300;
  double ftol = 1e-14;  // relative RSS decrease treated as stagnation
  double xtol = 1e-12;  // relative step size treated as stagnation
};

struct LmOutcome {
  std::vector<double> x;
  double rss = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Levenberg-Marquardt with Marquardt diagonal scaling and a central
/// difference Jacobian. The residual function returns false when it cannot
/// evaluate at x; such trial points count as increases.
[[nodiscard]] LmOutcome levenberg_marquardt(const ResidualFunction& f, std::vector<double> x0,
                                            const LmOptions& options = {});

struct SearchBox {
  std::vector<double> lo;  // natural (positive) units
  std::vector<double> hi;
};

struct FitOptions {
  std::size_t starts = 16;
  std::uint64_t seed = 20240501;
  std::size_t jobs = 1;
  LmOptions lm{};
  std::optional<SearchBox> box;  // override of the default search ranges
};

/// Default multistart ranges for a trophic form in a given assay.
[[nodiscard]] SearchBox default_lysis_box(AssayKind kind, TrophicForm::Kind form);

/// Start points: a Halton sequence over the log-box, shifted by a seeded
/// random offset modulo 1.
[[nodiscard]] std::vector<std::vector<double>> multistart_points(const SearchBox& box, std::size_t count,
                                                                 std::uint64_t seed);

/// Fits the coefficients of config.form (values in config are ignored) to
/// lysis data. Coefficients are optimised in log space, so stay positive.
[[nodiscard]] FitResult fit_lysis_curve(const std::vector<LysisDataPoint>& data, const AssayConfig& config,
                                        const FitOptions& options = {});
/// fit_lysis_curve restricted to the Treg->NK assay.
[[nodiscard]] FitResult fit_nk_apoptosis_curve(const std::vector<LysisDataPoint>& data, const AssayConfig& config,
                                               const FitOptions& options = {});

enum class GrowthModel { logistic, gompertz };
[[nodiscard]] std::string_view growth_model_name(GrowthModel m);
[[nodiscard]] std::optional<GrowthModel> growth_model_from_name(std::string_view name);

/// K (p0/K)^{e^{-rt}}.
[[nodiscard]] double gompertz_closed_form(double p0, double r, double K, double t);
/// Population at time t (days since the first datum).
[[nodiscard]] double growth_curve(GrowthModel m, double p0, double r, double K, double t);

struct GrowthFitOptions {
  bool fit_initial = true;  // false pins p0 to the first observation
  FitOptions fit{};
};

/// Least-squares (r, K[, p0]) for the closed-form growth curve; time is
/// measured from the first datum. Flat data yields a degenerate result with
/// r = 0; data that ends below where it starts is rejected.
[[nodiscard]] FitResult fit_growth_model(const std::vector<GrowthDataPoint>& data, GrowthModel model,
                                         const GrowthFitOptions& options = {});

/// `key = value` lines for a FitResult.
[[nodiscard]] std::string format_fit_report(const FitResult& fit);
/// CSV `x,observed,predicted,residual` using the given x values.
[[nodiscard]] std::string format_residual_csv(const FitResult& fit, const std::vector<double>& x,
                                              std::string_view x_name);

}  // namespace bcim
