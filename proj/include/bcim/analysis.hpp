#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "bcim/dosing.hpp"
#include "bcim/model.hpp"
#include "bcim/solver.hpp"

namespace bcim {

// ---------------------------------------------------------------------------
// Zero-tumor equilibrium and its linearisation (cell components only)

using CellMatrix = std::array<std::array<double, kCellComponents>, kCellComponents>;

/// T = B_T = X = 0, R = sigma_R/theta_R, B = sigma_B/theta_B, H = sigma_H/theta_H,
/// N = sigma_N / (theta_N + gamma_N R^delta_N - kappa H),
/// C = sigma_C / (theta_C + gamma_C R - eta_1 H/(eta_2 + H)).
/// Throws std::domain_error when either denominator is not positive.
[[nodiscard]] ModelState zero_tumor_equilibrium(const ModelParameters& params);

/// Analytic Jacobian of the seven cell equations at the zero-tumor equilibrium.
[[nodiscard]] CellMatrix jacobian_zero_tumor(const ModelParameters& params);

/// Closed-form spectrum in the order
/// {A11, -theta_B, -theta_BT, -theta_H, -theta_R, A33, -Lambda/theta_H}.
[[nodiscard]] std::array<double, kCellComponents> eigenvalues_zero_tumor(const ModelParameters& params);

/// Eigenvalues of a dense real 7x7 matrix, sorted by (real, imag).
[[nodiscard]] std::vector<std::complex<double>> numeric_eigenvalues(const CellMatrix& m);

struct StabilityReport {
  ModelState equilibrium;
  std::array<double, kCellComponents> eigenvalues{};  // closed form
  std::vector<std::complex<double>> numeric;          // dense solver
  bool stable = false;                                 // all real parts < 0
  std::vector<std::size_t> destabilizing;              // 1-based indices into eigenvalues
  bool closed_form_checked = false;
  double closed_form_mismatch = 0.0;  // max relative gap between sorted spectra
  std::string warning;
};

[[nodiscard]] StabilityReport stability_report(const ModelParameters& params);
[[nodiscard]] std::string format_stability_report(const StabilityReport& report);

// ---------------------------------------------------------------------------
// Threshold search

struct ThresholdOptions {
  double horizon = 300.0;     // days
  double resolution = 1e4;    // cells
  double lower = 1e3;         // initial tumor that must be beaten
  double upper = 1e11;        // initial tumor that must not be beaten
  double extinct_below = 1.0; // "beaten" means T(horizon) < this
  SolverConfig solver{};
  std::size_t jobs = 1;
};

struct ThresholdProbe {
  double initial_tumor;
  double final_tumor;
  bool beaten;
};

struct ThresholdResult {
  double threshold = 0.0;  // largest initial tumor known to be beaten
  double beaten = 0.0;     // bracket end that is beaten (== threshold)
  double survives = 0.0;   // smallest initial tumor known to persist
  std::vector<ThresholdProbe> probes;  // in evaluation order
};

/// Largest beatable initial tumor: immune components from base_ic, T varied.
/// Throws std::runtime_error when the bracket endpoints do not straddle the
/// outcome change.
[[nodiscard]] ThresholdResult max_beatable_tumor(const ModelParameters& params, const ModelState& base_ic,
                                                 const DoseSchedule& schedule, const ThresholdOptions& options = {});

// ---------------------------------------------------------------------------
// Local sensitivity

struct SensitivityEntry {
  Param param;
  double plus_pct;   // % change of final tumor for a +perturbation
  double minus_pct;  // % change for a -perturbation
};

struct SensitivityReport {
  double baseline_final_tumor = 0.0;
  double horizon = 0.0;
  double perturbation = 0.0;
  std::vector<SensitivityEntry> entries;  // parameter table order

  [[nodiscard]] const SensitivityEntry& entry(Param p) const;
  /// Entries ordered by decreasing |plus_pct| (ties keep table order).
  [[nodiscard]] std::vector<SensitivityEntry> ranked() const;
};

struct SensitivityOptions {
  double perturbation = 0.01;
  DoseSchedule schedule{};
  SolverConfig solver{};
  std::size_t jobs = 1;
};

[[nodiscard]] SensitivityReport sensitivity_scan(const ModelParameters& params, const ModelState& ic, double horizon,
                                                 const SensitivityOptions& options = {});

/// CSV `parameter,plus_pct,minus_pct` in ranked order.
[[nodiscard]] std::string format_sensitivity_csv(const SensitivityReport& report);

}  // namespace bcim
