#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "bcim/dosing.hpp"
#include "bcim/model.hpp"

namespace bcim {

struct SolverConfig {
  // explicit_rk: Dormand-Prince 5(4) only. stiff: Rosenbrock 4(3) only.
  // automatic: Dormand-Prince, switching to Rosenbrock for the remainder of
  // a dose segment once the stiffness detector fires.
  enum class Method { automatic, explicit_rk, stiff };

  double rtol = 1e-8;
  double atol_cells = 1e-6;
  double atol_X = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();  // days
  // Dense output spacing in days; 0 records only t_start, dose breakpoints and t_end.
  double sample_interval = 0.1;
  Method method = Method::automatic;
  std::size_t max_steps = 10'000'000;

  void validate() const;  // throws std::invalid_argument
  [[nodiscard]] SolverConfig with_tolerance_scale(double factor) const;
};

[[nodiscard]] std::string_view method_name(SolverConfig::Method m);
[[nodiscard]] SolverConfig::Method method_from_name(std::string_view name);

struct SolverStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t stiff_steps = 0;       // accepted Rosenbrock steps
  std::size_t domain_rejections = 0;  // rejections caused by leaving the domain
  std::size_t rhs_evaluations = 0;
  std::size_t jacobian_evaluations = 0;
  double rtol = 0.0;
  double atol_cells = 0.0;
  double atol_X = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ModelState> states;
  SolverStats stats;

  [[nodiscard]] const ModelState& final_state() const { return states.back(); }
  [[nodiscard]] std::size_t size() const { return times.size(); }
};

/// Thrown on step-size underflow, step budget exhaustion or when the state
/// leaves the admissible domain and no step reduction recovers it.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t) : std::runtime_error(what), t_(t) {}
  [[nodiscard]] double time() const { return t_; }

 private:
  double t_;
};

/// Integrates the model over [t_start, t_end]. Every dose window boundary in
/// the open interval is a hard step boundary and appears in the output.
[[nodiscard]] Trajectory integrate(const ModelState& ic, const ModelParameters& params, const DoseSchedule& schedule,
                                   double t_start, double t_end, const SolverConfig& config = {});

/// Convenience for callers that only need the end state.
[[nodiscard]] ModelState integrate_final(const ModelState& ic, const ModelParameters& params,
                                         const DoseSchedule& schedule, double t_start, double t_end,
                                         SolverConfig config = {});

/// K p0 e^{rt} / (K + p0 (e^{rt} - 1)).
[[nodiscard]] double logistic_closed_form(double p0, double r, double K, double t);

/// CSV with header t,T,N,C,H,R,B,B_T,X and shortest round-trip numbers.
[[nodiscard]] std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace bcim
