#include "bcim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bcim/ode/steppers.hpp"
#include "bcim/text.hpp"

namespace bcim {

void SolverConfig::validate() const {
  if (!(rtol > 0.0) || !(atol_cells > 0.0) || !(atol_X > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (!(max_step > 0.0)) throw std::invalid_argument("max_step must be positive");
  if (!(sample_interval >= 0.0) || !std::isfinite(sample_interval)) {
    throw std::invalid_argument("sample_interval must be finite and >= 0");
  }
  if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
}

SolverConfig SolverConfig::with_tolerance_scale(double factor) const {
  SolverConfig c = *this;
  c.rtol *= factor;
  c.atol_cells *= factor;
  c.atol_X *= factor;
  return c;
}

std::string_view method_name(SolverConfig::Method m) {
  switch (m) {
    case SolverConfig::Method::automatic: return "auto";
    case SolverConfig::Method::explicit_rk: return "explicit";
    case SolverConfig::Method::stiff: return "stiff";
  }
  return "auto";
}

SolverConfig::Method method_from_name(std::string_view name) {
  if (name == "auto") return SolverConfig::Method::automatic;
  if (name == "explicit" || name == "dopri5") return SolverConfig::Method::explicit_rk;
  if (name == "stiff" || name == "rosenbrock") return SolverConfig::Method::stiff;
  throw std::invalid_argument("unknown solver method '" + std::string(name) + "' (auto, explicit, stiff)");
}

namespace {

using Vec8 = ode::Vec<kStateSize>;
using Matrix8 = ode::RosenbrockStep<kStateSize>::Matrix;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;
constexpr double kDomainShrink = 0.25;
constexpr double kStiffThreshold = 3.25;
constexpr int kStiffTrigger = 15;
constexpr int kNonStiffReset = 6;

double step_factor(double err, double order, bool after_reject) {
  double fac = err == 0.0 ? kMaxFactor : kSafety * std::pow(err, -1.0 / order);
  fac = std::clamp(fac, kMinFactor, kMaxFactor);
  return after_reject ? std::min(fac, 1.0) : fac;
}

class Integrator {
 public:
  Integrator(const ModelParameters& params, const SolverConfig& config, Trajectory& out, std::vector<double> samples)
      : params_(params), config_(config), out_(out), samples_(std::move(samples)) {
    atol_.fill(config.atol_cells);
    atol_[static_cast<std::size_t>(Component::X)] = config.atol_X;
  }

  void run(Vec8 y, double t_start, double t_end, const DoseSchedule& schedule) {
    for (std::size_t i = 0; i < kStateSize; ++i) scale_[i] = std::abs(y[i]);
    std::vector<double> bounds{t_start};
    for (double b : schedule.breakpoints(t_start, t_end)) bounds.push_back(b);
    bounds.push_back(t_end);
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
      segment(y, bounds[s], bounds[s + 1], schedule.rate_at(bounds[s]));
    }
  }

 private:
  bool eval(const Vec8& y, Vec8& dydt) {
    ++out_.stats.rhs_evaluations;
    Vec8 yc = y;
    if (!clamp_to_domain(yc, scale_)) return false;
    rhs_into(yc, params_, dose_, dydt);
    return std::all_of(dydt.begin(), dydt.end(), [](double d) { return std::isfinite(d); });
  }

  double error_scaled_norm(const Vec8& v, const Vec8& y) const {
    Vec8 zero{};
    return ode::error_norm<kStateSize>(v, y, zero, config_.rtol, atol_);
  }

  double initial_step(const Vec8& y, const Vec8& f0, double span) {
    const double d0 = error_scaled_norm(y, y);
    const double d1 = error_scaled_norm(f0, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    Vec8 y1, f1;
    for (std::size_t i = 0; i < kStateSize; ++i) y1[i] = y[i] + h0 * f0[i];
    double h1 = h0 * 1e-3;
    if (eval(y1, f1)) {
      Vec8 df;
      for (std::size_t i = 0; i < kStateSize; ++i) df[i] = f1[i] - f0[i];
      const double d2 = error_scaled_norm(df, y) / h0;
      const double m = std::max(d1, d2);
      h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5.0);
    }
    return std::min({100.0 * h0, h1, config_.max_step, span});
  }

  void record(double t, Vec8 y) {
    for (double& v : y) v = std::max(v, 0.0);
    out_.times.push_back(t);
    out_.states.push_back(ModelState::from_array(y));
  }

  template <class Interp>
  void emit(double t, double h, double t_new, const Vec8& y_new, Interp&& interp) {
    while (next_sample_ < samples_.size() && samples_[next_sample_] <= t_new) {
      const double s = samples_[next_sample_++];
      if (s == t_new) {
        record(s, y_new);
      } else {
        record(s, interp((s - t) / h));
      }
    }
  }

  void check_budget(double t) const {
    if (out_.stats.accepted_steps + out_.stats.rejected_steps >= config_.max_steps) {
      throw IntegrationError("step budget of " + std::to_string(config_.max_steps) + " exhausted at t = " +
                                 format_double(t),
                             t);
    }
  }

  void segment(Vec8& y, double a, double b, double dose) {
    dose_ = dose;
    double t = a;
    Vec8 f0;
    if (!eval(y, f0)) throw IntegrationError("state outside the admissible domain at t = " + format_double(t), t);
    if (!(h_ > 0.0)) h_ = initial_step(y, f0, b - a);

    bool stiff = config_.method == SolverConfig::Method::stiff;
    int stiff_hits = 0, calm_hits = 0;
    bool after_reject = false;
    bool have_jac = false;
    Matrix8 jac;
    ode::DormandPrinceStep<kStateSize> dp;
    ode::RosenbrockStep<kStateSize> ros;

    while (t < b) {
      check_budget(t);
      double h = std::min(h_, config_.max_step);
      bool last = false;
      if (t + h >= b || (b - t - h) < 1e-10 * h) {
        h = b - t;
        last = true;
      }
      if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
        throw IntegrationError("step size underflow at t = " + format_double(t), t);
      }

      auto reject_domain = [&] {
        ++out_.stats.rejected_steps;
        ++out_.stats.domain_rejections;
        h_ = h * kDomainShrink;
        after_reject = true;
      };

      Vec8 y_new, f_new;
      double err = 0.0;
      if (!stiff) {
        if (!dp.compute([this](const Vec8& u, Vec8& du) { return eval(u, du); }, y, f0, h)) {
          reject_domain();
          continue;
        }
        y_new = dp.y1;
        if (!clamp_to_domain(y_new, scale_)) {
          reject_domain();
          continue;
        }
        err = ode::error_norm<kStateSize>(dp.err, y, dp.y1, config_.rtol, atol_);
        if (!(err <= 1.0)) {
          ++out_.stats.rejected_steps;
          h_ = h * (std::isfinite(err) ? step_factor(err, 5.0, true) : kMinFactor);
          after_reject = true;
          continue;
        }
        f_new = dp.k7;
        if (y_new != dp.y1 && !eval(y_new, f_new)) {
          reject_domain();
          continue;
        }
      } else {
        if (!have_jac) {
          Vec8 yc = y;
          static_cast<void>(clamp_to_domain(yc, scale_));
          const JacobianMatrix J = rhs_jacobian(yc, params_);
          for (std::size_t i = 0; i < kStateSize; ++i)
            for (std::size_t j = 0; j < kStateSize; ++j) jac(int(i), int(j)) = J[i][j];
          ++out_.stats.jacobian_evaluations;
          have_jac = true;
        }
        if (!ros.compute([this](const Vec8& u, Vec8& du) { return eval(u, du); }, y, f0, jac, h)) {
          reject_domain();
          continue;
        }
        y_new = ros.y1;
        if (!clamp_to_domain(y_new, scale_)) {
          reject_domain();
          continue;
        }
        err = ode::error_norm<kStateSize>(ros.err, y, ros.y1, config_.rtol, atol_);
        if (!(err <= 1.0)) {
          ++out_.stats.rejected_steps;
          h_ = h * (std::isfinite(err) ? step_factor(err, 4.0, true) : kMinFactor);
          after_reject = true;
          continue;
        }
        if (!eval(y_new, f_new)) {
          reject_domain();
          continue;
        }
      }

      // Accepted.
      const double t_new = last ? b : t + h;
      ++out_.stats.accepted_steps;
      if (stiff) {
        ++out_.stats.stiff_steps;
        emit(t, h, t_new, y_new, [&](double th) { return ode::hermite<kStateSize>(y, f0, y_new, f_new, h, th); });
        have_jac = false;
      } else {
        emit(t, h, t_new, y_new, [&](double th) { return dp.interpolate(th); });
        if (config_.method == SolverConfig::Method::automatic) {
          if (dp.stiffness_ratio(h) > kStiffThreshold) {
            calm_hits = 0;
            if (++stiff_hits >= kStiffTrigger) stiff = true;
          } else if (++calm_hits >= kNonStiffReset) {
            stiff_hits = 0;
          }
        }
      }
      for (std::size_t i = 0; i < kStateSize; ++i) scale_[i] = std::max(scale_[i], std::abs(y_new[i]));
      y = y_new;
      f0 = f_new;
      t = t_new;
      // A step cut short by the segment end says nothing about the next one.
      if (!last) h_ = h * step_factor(err, stiff ? 4.0 : 5.0, after_reject);
      after_reject = false;
    }
  }

  const ModelParameters& params_;
  const SolverConfig& config_;
  Trajectory& out_;
  std::vector<double> samples_;
  std::size_t next_sample_ = 0;
  Vec8 atol_{};
  Vec8 scale_{};
  double dose_ = 0.0;
  double h_ = 0.0;
};

std::vector<double> sample_times(double t0, double t1, double dt, const std::vector<double>& events) {
  std::vector<double> out;
  if (dt > 0.0) {
    for (std::size_t k = 1;; ++k) {
      const double s = t0 + static_cast<double>(k) * dt;
      if (s >= t1) break;
      out.push_back(s);
    }
  }
  out.insert(out.end(), events.begin(), events.end());
  out.push_back(t1);
  std::sort(out.begin(), out.end());
  // Drop grid points that collide with an event to keep times strictly increasing.
  std::vector<double> unique;
  for (double s : out) {
    if (unique.empty() || s - unique.back() > 1e-12 * std::max(1.0, std::abs(s))) {
      unique.push_back(s);
    } else if (std::find(events.begin(), events.end(), s) != events.end() || s == t1) {
      unique.back() = s;
    }
  }
  return unique;
}

}  // namespace

Trajectory integrate(const ModelState& ic, const ModelParameters& params, const DoseSchedule& schedule,
                     double t_start, double t_end, const SolverConfig& config) {
  config.validate();
  if (!ic.in_domain()) throw std::domain_error("initial condition has negative or non-finite components");
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_end < t_start) {
    throw std::invalid_argument("time span must satisfy t_start <= t_end");
  }
  Trajectory out;
  out.stats.rtol = config.rtol;
  out.stats.atol_cells = config.atol_cells;
  out.stats.atol_X = config.atol_X;
  out.times.push_back(t_start);
  out.states.push_back(ic);
  if (t_end == t_start) return out;

  const auto events = schedule.breakpoints(t_start, t_end);
  Integrator integrator(params, config, out, sample_times(t_start, t_end, config.sample_interval, events));
  integrator.run(ic.to_array(), t_start, t_end, schedule);
  return out;
}

ModelState integrate_final(const ModelState& ic, const ModelParameters& params, const DoseSchedule& schedule,
                           double t_start, double t_end, SolverConfig config) {
  config.sample_interval = 0.0;
  return integrate(ic, params, schedule, t_start, t_end, config).final_state();
}

double logistic_closed_form(double p0, double r, double K, double t) {
  if (!(p0 >= 0.0)) throw std::domain_error("initial population must be >= 0");
  if (!(K > 0.0)) throw std::domain_error("carrying capacity must be > 0");
  // Same expression divided through by e^{rt}; stays finite for large rt.
  return K * p0 / (p0 + (K - p0) * std::exp(-r * t));
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  for (auto name : kComponentNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_double(traj.times[i]);
    for (double v : traj.states[i].to_array()) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  write_text_file(path, trajectory_csv(traj));
}

}  // namespace bcim
