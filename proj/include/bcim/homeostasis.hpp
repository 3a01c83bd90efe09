#pragma once

#include <array>
#include <string_view>

#include "bcim/model.hpp"

namespace bcim {

/// A biologically sourced population vector (T, N, C, H, R, B, B_T) in
/// cells; rituximab is implicitly zero.
struct HomeostasisState {
  enum class Label { zero_tumor, high_tumor };

  Label label;
  std::array<double, kCellComponents> values;

  [[nodiscard]] double operator[](Component c) const { return values.at(static_cast<std::size_t>(c)); }
  [[nodiscard]] ModelState to_model_state() const;
};

/// ln 2 / half_life. Throws std::domain_error for nonpositive input.
[[nodiscard]] double half_life_to_rate(double half_life_days);

/// Exponential death rate implied by a fractional reduction p_E observed
/// after t_F days of culture: (1/t_F) ln(1/(1-p_E)).
[[nodiscard]] double in_vitro_death_rate(double t_final_days, double reduction_fraction);

/// Healthy state E0 (T = B_T = 0).
[[nodiscard]] HomeostasisState zero_tumor_state();
/// High-tumor state E1 with T at the immunodeficient carrying capacity 1/b.
[[nodiscard]] HomeostasisState high_tumor_state();

/// The eleven constants back-solved from the homeostasis states.
struct DerivedParameters {
  double sigma_H, sigma_R, sigma_B;
  double kappa, p;
  double eta_1, r;
  double c_1, j_H;
  double c_2, theta_BT;

  /// Merges into `literature` (overwriting any derived names already there).
  [[nodiscard]] PartialParameters merged_into(PartialParameters literature) const;
  [[nodiscard]] std::array<std::pair<Param, double>, 11> entries() const;
};

/// Parameters that must be supplied before derivation.
[[nodiscard]] std::vector<Param> literature_parameter_names();
[[nodiscard]] bool is_derived_parameter(Param p);

/// Solves each defining equilibrium equation in dependency order:
/// sigma_H, sigma_R, sigma_B, kappa, eta_1 from E0; p, r, c_1, j_H, c_2,
/// theta_BT from E1. Throws std::invalid_argument when a literature value is
/// missing and std::domain_error when a solved value is not positive.
[[nodiscard]] DerivedParameters derive_parameters(const HomeostasisState& e0, const HomeostasisState& e1,
                                                  const PartialParameters& literature);

/// Literature-sourced values from the parameter table, with the NK-lysis
/// triple at the simulation defaults c = 15, delta = 1, s_N = 25.
[[nodiscard]] PartialParameters table_literature_parameters();

/// Every value exactly as printed in the parameter table (derived values
/// rounded to three significant figures), same NK-lysis defaults.
[[nodiscard]] ModelParameters table_parameters();

/// Literature values combined with full-precision derived values. This is
/// the default parameter set for simulations.
[[nodiscard]] ModelParameters baseline_parameters();

}  // namespace bcim
