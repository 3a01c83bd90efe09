#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bcim {

/// State components, in the order used by every array view of a ModelState.
enum class Component : std::size_t { T, N, C, H, R, B, B_T, X };

inline constexpr std::size_t kStateSize = 8;
inline constexpr std::size_t kCellComponents = 7;

inline constexpr std::array<std::string_view, kStateSize> kComponentNames = {
    "T", "N", "C", "H", "R", "B", "B_T", "X"};

std::optional<Component> component_from_name(std::string_view name);

using StateVector = std::array<double, kStateSize>;

/// Tumor and immune populations (cells) plus rituximab concentration X (ug/mL).
struct ModelState {
  double T = 0.0;
  double N = 0.0;
  double C = 0.0;
  double H = 0.0;
  double R = 0.0;
  double B = 0.0;
  double B_T = 0.0;
  double X = 0.0;

  [[nodiscard]] StateVector to_array() const { return {T, N, C, H, R, B, B_T, X}; }
  [[nodiscard]] static ModelState from_array(const StateVector& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
  }

  [[nodiscard]] double operator[](Component c) const { return to_array()[static_cast<std::size_t>(c)]; }
  [[nodiscard]] ModelState with(Component c, double value) const;

  /// True when every component is finite and nonnegative.
  [[nodiscard]] bool in_domain() const;

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

/// Named rate constants. Order follows the published parameter table.
enum class Param : std::size_t {
  a, b, lambda_R, c, delta, s_N, d, l, s_C,
  sigma_N, theta_N, p, gamma_N, delta_N, kappa,
  sigma_C, theta_C, q, gamma_C, r, j_C, k_C, eta_1, eta_2,
  sigma_H, theta_H, j_H, k_H, c_1,
  sigma_R, theta_R,
  sigma_B, theta_B, c_2, gamma_B,
  theta_BT,
  theta_X,
};

inline constexpr std::size_t kParamCount = 37;

inline constexpr std::array<std::string_view, kParamCount> kParamNames = {
    "a",       "b",       "lambda_R", "c",       "delta",   "s_N",     "d",       "l",
    "s_C",     "sigma_N", "theta_N",  "p",       "gamma_N", "delta_N", "kappa",   "sigma_C",
    "theta_C", "q",       "gamma_C",  "r",       "j_C",     "k_C",     "eta_1",   "eta_2",
    "sigma_H", "theta_H", "j_H",      "k_H",     "c_1",     "sigma_R", "theta_R", "sigma_B",
    "theta_B", "c_2",     "gamma_B",  "theta_BT", "theta_X"};

std::optional<Param> param_from_name(std::string_view name);
[[nodiscard]] inline std::string_view param_name(Param p) { return kParamNames[static_cast<std::size_t>(p)]; }
[[nodiscard]] std::array<Param, kParamCount> all_params();

/// A parameter assignment that may be incomplete (e.g. literature values
/// before the homeostasis-derived constants are solved for).
class PartialParameters {
 public:
  [[nodiscard]] bool has(Param p) const { return values_[idx(p)].has_value(); }
  [[nodiscard]] double get(Param p) const;  // throws std::out_of_range when unset
  [[nodiscard]] std::optional<double> find(Param p) const { return values_[idx(p)]; }
  PartialParameters& set(Param p, double v);
  PartialParameters& erase(Param p);
  [[nodiscard]] std::vector<Param> missing() const;

 private:
  static constexpr std::size_t idx(Param p) { return static_cast<std::size_t>(p); }
  std::array<std::optional<double>, kParamCount> values_{};
};

/// Complete, validated, immutable parameter set. Modified copies are made
/// with `with`.
class ModelParameters {
 public:
  /// Throws std::invalid_argument when a value is negative or non-finite, or
  /// when one of the exponents (delta, l, delta_N) or b is not strictly positive.
  explicit ModelParameters(const std::array<double, kParamCount>& values);
  /// Throws std::invalid_argument naming the missing parameters.
  explicit ModelParameters(const PartialParameters& partial);

  [[nodiscard]] double operator[](Param p) const { return values_[static_cast<std::size_t>(p)]; }
  [[nodiscard]] ModelParameters with(Param p, double value) const;
  [[nodiscard]] const std::array<double, kParamCount>& values() const { return values_; }
  [[nodiscard]] PartialParameters to_partial() const;

  friend bool operator==(const ModelParameters&, const ModelParameters&) = default;

 private:
  std::array<double, kParamCount> values_;
};

/// Functional-response families used for predator-prey killing in the
/// co-culture assays.
///   power:            m * pred^e
///   rational-hill:    m * pred^e / (s * prey^e + pred^e)
///   michaelis-menten: m * pred / (e + pred)
class TrophicForm {
 public:
  enum class Kind { power, rational_hill, michaelis_menten };

  /// Throws std::invalid_argument when the coefficient count does not match
  /// the kind (2 for power and michaelis-menten, 3 for rational-hill).
  TrophicForm(Kind kind, std::vector<double> coefficients);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::span<const double> coefficients() const { return coefficients_; }
  [[nodiscard]] double magnitude() const { return coefficients_[0]; }

  /// Per-capita kill rate of the prey (day^-1).
  [[nodiscard]] double rate(double prey, double predator) const;

  [[nodiscard]] static std::size_t coefficient_count(Kind kind);
  [[nodiscard]] static std::string_view kind_name(Kind kind);
  [[nodiscard]] static std::optional<Kind> kind_from_name(std::string_view name);
  /// Names of the coefficients in display order (e.g. {"c", "delta", "s_N"}).
  [[nodiscard]] static std::vector<std::string> coefficient_names(Kind kind, bool nk_assay);

 private:
  Kind kind_;
  std::vector<double> coefficients_;
};

/// Per-capita tumor kill rate by NK cells with Treg inhibition (day^-1).
/// Zero when N == 0. Throws std::domain_error on negative inputs.
[[nodiscard]] double nk_lysis_fraction(double T, double N, double R, const ModelParameters& params);

/// Per-capita tumor kill rate by CD8+ T cells (day^-1). Zero when C == 0.
[[nodiscard]] double cd8_lysis_fraction(double T, double C, const ModelParameters& params);

/// Right-hand side of the eight-equation model. `dose_rate` is the
/// instantaneous infusion rate v(t) in ug mL^-1 day^-1. All state components
/// must be nonnegative; see clamp_to_domain for the solver-side tolerance.
[[nodiscard]] ModelState rhs(const ModelState& state, const ModelParameters& params, double dose_rate);

/// Array form used by the integrators; `y` must already be in the domain.
void rhs_into(const StateVector& y, const ModelParameters& params, double dose_rate, StateVector& dydt);

using JacobianMatrix = std::array<std::array<double, kStateSize>, kStateSize>;

/// Analytic Jacobian d(rhs)/d(state), rows and columns in Component order.
[[nodiscard]] JacobianMatrix rhs_jacobian(const StateVector& y, const ModelParameters& params);

/// Relative tolerance below zero that counts as integration round-off.
inline constexpr double kNegativeClampTolerance = 1e-9;

/// Clamps components in (-tol * scale_i, 0) to zero. Returns false (leaving
/// `y` untouched) when any component lies further below zero.
[[nodiscard]] bool clamp_to_domain(StateVector& y, std::span<const double, kStateSize> scale,
                                   double tol = kNegativeClampTolerance);

}  // namespace bcim
