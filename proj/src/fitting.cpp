#include "bcim/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "bcim/clinical.hpp"
#include "bcim/ode/steppers.hpp"
#include "bcim/parallel.hpp"
#include "bcim/text.hpp"

namespace bcim {

// ---------------------------------------------------------------------------
// Assays

void AssayConfig::validate() const {
  if (!(prey_initial > 0.0)) throw std::invalid_argument("assay prey_initial must be > 0");
  if (!(duration > 0.0)) throw std::invalid_argument("assay duration must be > 0");
  if (!(predator_decay >= 0.0) || !(prey_decay >= 0.0)) throw std::invalid_argument("assay decay rates must be >= 0");
}

AssayConfig AssayConfig::with_coefficients(std::vector<double> coefficients) const {
  AssayConfig c = *this;
  c.form = TrophicForm(form.kind(), std::move(coefficients));
  return c;
}

AssayConfig AssayConfig::tumor_assay(double tumor_initial, TrophicForm form) {
  AssayConfig c;
  c.kind = AssayKind::nk_lyses_tumor;
  c.prey_initial = tumor_initial;
  c.predator_decay = kInVitroNkDeathRate;
  c.prey_decay = 0.0;
  c.duration = kTumorAssayHours / 24.0;
  c.form = std::move(form);
  return c;
}

AssayConfig AssayConfig::nk_assay(TrophicForm form) {
  AssayConfig c;
  c.kind = AssayKind::treg_kills_nk;
  c.prey_initial = kNkAssayInitialCells;
  c.predator_decay = kInVitroTregDeathRate;
  c.prey_decay = kInVitroNkDeathRate;
  c.duration = kNkAssayHours / 24.0;
  c.form = std::move(form);
  return c;
}

std::string_view assay_name(AssayKind kind) {
  return kind == AssayKind::nk_lyses_tumor ? "lysis" : "nk-apoptosis";
}

std::optional<AssayKind> assay_from_name(std::string_view name) {
  if (name == "lysis" || name == "nk-lyses-tumor") return AssayKind::nk_lyses_tumor;
  if (name == "nk-apoptosis" || name == "treg-kills-nk") return AssayKind::treg_kills_nk;
  return std::nullopt;
}

namespace {

// Prey surviving at t_final. The prey equation is integrated in log form,
// y = (ln prey, predator): a large kill rate then gives a steep but smooth
// descent instead of a stiff collapse towards zero.
double surviving_prey(const AssayConfig& cfg, double ratio) {
  using V2 = ode::Vec<2>;
  auto f = [&](const V2& y, V2& dy) {
    const double prey = std::exp(y[0]), pred = std::max(y[1], 0.0);
    dy[0] = -cfg.prey_decay - cfg.form.rate(prey, pred);
    dy[1] = -cfg.predator_decay * pred;
    return std::isfinite(dy[0]) && std::isfinite(dy[1]);
  };
  const double rtol = 1e-11;
  const V2 atol{1e-12, 1e-12 * std::max(1.0, ratio * cfg.prey_initial)};

  V2 y{std::log(cfg.prey_initial), ratio * cfg.prey_initial};
  V2 k1;
  if (!f(y, k1)) throw std::runtime_error("assay right-hand side not finite at t = 0");
  const double tf = cfg.duration;
  double t = 0.0;
  double h = tf * 1e-3;
  ode::DormandPrinceStep<2> step;
  std::size_t attempts = 0;
  while (t < tf) {
    if (++attempts > 1'000'000) throw std::runtime_error("assay integration exceeded its step budget");
    bool last = false;
    if (t + h >= tf) {
      h = tf - t;
      last = true;
    }
    if (h < 1e-15 * tf) throw std::runtime_error("assay integration step size underflow");
    if (!step.compute(f, y, k1, h)) {
      h *= 0.25;
      continue;
    }
    const double err = ode::error_norm<2>(step.err, y, step.y1, rtol, atol);
    if (!(err <= 1.0)) {
      h *= std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0) : 0.2;
      continue;
    }
    t = last ? tf : t + h;
    y = step.y1;
    k1 = step.k7;
    h *= err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
  }
  return std::exp(y[0]);
}

}  // namespace

double percent_specific_lysis(const AssayConfig& config, double ratio) {
  config.validate();
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw std::domain_error("ratio must be a finite value >= 0");
  const double survivors = surviving_prey(config, ratio);
  double reference = config.prey_initial;
  if (config.kind == AssayKind::treg_kills_nk && config.normalization == NkNormalization::treg_attributable) {
    reference = config.prey_initial * std::exp(-config.prey_decay * config.duration);
  }
  return std::clamp((reference - survivors) / reference, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// CSV readers

namespace {

struct CsvRows {
  std::string header0, header1;
  std::vector<std::pair<double, double>> rows;
};

CsvRows read_two_column_csv(std::string_view text, const std::string& source) {
  CsvRows out;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = strip_comment(raw);
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 2) throw ParseError(source, line_no, "expected two comma-separated columns");
    double a = 0.0, b = 0.0;
    const bool numeric = parse_double(cols[0], a) && parse_double(cols[1], b);
    if (!numeric) {
      if (header_seen || !out.rows.empty()) throw ParseError(source, line_no, "bad number");
      out.header0 = std::string(cols[0]);
      out.header1 = std::string(cols[1]);
      header_seen = true;
      continue;
    }
    if (!(a >= 0.0) || !(b >= 0.0)) throw ParseError(source, line_no, "values must be nonnegative");
    out.rows.emplace_back(a, b);
  }
  if (out.rows.empty()) throw ParseError(source, line_no, "no data rows");
  return out;
}

}  // namespace

std::vector<GrowthDataPoint> parse_growth_csv(std::string_view text, const std::string& source) {
  const CsvRows csv = read_two_column_csv(text, source);
  bool volume = false;
  if (!csv.header1.empty()) {
    if (csv.header0 != "t_days") throw ParseError(source, 1, "first column must be t_days");
    if (csv.header1 == "volume_mm3") volume = true;
    else if (csv.header1 != "cells") throw ParseError(source, 1, "second column must be cells or volume_mm3");
  }
  std::vector<GrowthDataPoint> out;
  for (auto [t, v] : csv.rows) out.push_back({t, volume ? volume_to_cells(v) : v});
  return out;
}

std::vector<GrowthDataPoint> read_growth_csv(const std::filesystem::path& path) {
  return parse_growth_csv(read_text_file(path), path.string());
}

std::vector<LysisDataPoint> parse_lysis_csv(std::string_view text, const std::string& source) {
  const CsvRows csv = read_two_column_csv(text, source);
  if (!csv.header1.empty() && (csv.header0 != "ratio" || csv.header1 != "lysis_percent")) {
    throw ParseError(source, 1, "header must be ratio,lysis_percent");
  }
  std::vector<LysisDataPoint> out;
  for (auto [ratio, pct] : csv.rows) {
    if (pct > 100.0) throw std::invalid_argument(source + ": lysis_percent above 100");
    out.push_back({ratio, pct / 100.0});
  }
  return out;
}

std::vector<LysisDataPoint> read_lysis_csv(const std::filesystem::path& path) {
  return parse_lysis_csv(read_text_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Levenberg-Marquardt

double FitResult::parameter(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return parameters[i];
  }
  throw std::out_of_range("fit has no parameter '" + std::string(name) + "'");
}

namespace {

double sum_squares(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

bool numeric_jacobian(const ResidualFunction& f, const std::vector<double>& x, std::size_t m, Eigen::MatrixXd& J) {
  const std::size_t n = x.size();
  J.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  std::vector<double> xp = x, rp(m), rm(m);
  for (std::size_t j = 0; j < n; ++j) {
    const double step = 1e-6 * (1.0 + std::abs(x[j]));
    xp[j] = x[j] + step;
    if (!f(xp, rp)) return false;
    xp[j] = x[j] - step;
    if (!f(xp, rm)) return false;
    xp[j] = x[j];
    for (std::size_t i = 0; i < m; ++i) {
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (rp[i] - rm[i]) / (2.0 * step);
    }
  }
  return true;
}

}  // namespace

LmOutcome levenberg_marquardt(const ResidualFunction& f, std::vector<double> x0, const LmOptions& options) {
  LmOutcome out;
  out.x = std::move(x0);
  std::vector<double> r;
  if (!f(out.x, r)) {
    out.rss = std::numeric_limits<double>::infinity();
    return out;
  }
  const std::size_t m = r.size(), n = out.x.size();
  out.rss = sum_squares(r);
  double lambda = 1e-3;
  std::vector<double> trial(n), r_trial(m);
  Eigen::MatrixXd J;

  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    if (out.rss == 0.0) {
      out.converged = true;
      return out;
    }
    if (!numeric_jacobian(f, out.x, m, J)) return out;
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(m));
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * rv;
    Eigen::VectorXd D = A.diagonal();
    const double dmax = D.maxCoeff();
    if (!(dmax > 0.0)) {
      out.converged = true;  // residuals do not depend on x
      return out;
    }
    D = D.cwiseMax(1e-12 * dmax);

    bool accepted = false;
    Eigen::VectorXd delta;
    double rss_trial = 0.0;
    while (lambda <= 1e16) {
      Eigen::MatrixXd M = A;
      M.diagonal() += lambda * D;
      delta = M.ldlt().solve(-g);
      for (std::size_t j = 0; j < n; ++j) trial[j] = out.x[j] + delta[static_cast<Eigen::Index>(j)];
      if (delta.allFinite() && f(trial, r_trial)) {
        rss_trial = sum_squares(r_trial);
        if (rss_trial < out.rss) {
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent at any damping: a stationary point to working precision.
      out.converged = true;
      return out;
    }
    const double decrease = out.rss - rss_trial;
    const double x_norm = Eigen::Map<const Eigen::VectorXd>(out.x.data(), static_cast<Eigen::Index>(n)).norm();
    out.x = trial;
    r = r_trial;
    out.rss = rss_trial;
    lambda = std::max(lambda / 10.0, 1e-12);
    if (decrease <= options.ftol * (out.rss + decrease) || delta.norm() <= options.xtol * (1.0 + x_norm)) {
      out.converged = true;
      ++out.iterations;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multistart

namespace {

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, v = 0.0;
  while (i > 0) {
    v += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return v;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13};

void validate_box(const SearchBox& box) {
  if (box.lo.size() != box.hi.size() || box.lo.empty() || box.lo.size() > std::size(kPrimes)) {
    throw std::invalid_argument("search box has mismatched or unsupported dimensions");
  }
  for (std::size_t j = 0; j < box.lo.size(); ++j) {
    if (!(box.lo[j] > 0.0) || !(box.hi[j] >= box.lo[j])) {
      throw std::invalid_argument("search box bounds must satisfy 0 < lo <= hi");
    }
  }
}

}  // namespace

std::vector<std::vector<double>> multistart_points(const SearchBox& box, std::size_t count, std::uint64_t seed) {
  validate_box(box);
  const std::size_t dim = box.lo.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(dim);
  for (double& s : shift) s = unit(rng);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> p(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      double u = radical_inverse(i + 1, kPrimes[j]) + shift[j];
      u -= std::floor(u);
      const double lo = std::log(box.lo[j]), hi = std::log(box.hi[j]);
      p[j] = std::exp(lo + u * (hi - lo));
    }
    out.push_back(std::move(p));
  }
  return out;
}

SearchBox default_lysis_box(AssayKind kind, TrophicForm::Kind form) {
  using K = TrophicForm::Kind;
  if (kind == AssayKind::nk_lyses_tumor) {
    switch (form) {
      case K::power: return {{1e-10, 0.3}, {1e-2, 3.0}};
      case K::rational_hill: return {{1.0, 0.3, 0.1}, {200.0, 3.0, 1000.0}};
      case K::michaelis_menten: return {{1.0, 1e4}, {1000.0, 1e9}};
    }
  }
  switch (form) {
    case K::power: return {{1e-9, 0.2}, {1e-3, 2.0}};
    case K::rational_hill: return {{1e-2, 0.2, 1e-2}, {1e13, 2.0, 1e13}};
    case K::michaelis_menten: return {{1e-2, 1e6}, {100.0, 1e12}};
  }
  throw std::invalid_argument("unknown trophic form");
}

namespace {

// Column-normalised Jacobian in log coordinates; a near-zero singular value
// means some combination of coefficients leaves the fit unchanged.
bool poorly_identified(const ResidualFunction& f, const std::vector<double>& log_x, std::size_t m) {
  Eigen::MatrixXd J;
  if (!numeric_jacobian(f, log_x, m, J)) return true;
  for (Eigen::Index j = 0; j < J.cols(); ++j) {
    const double norm = J.col(j).norm();
    if (!(norm > 0.0)) return true;
    J.col(j) /= norm;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) < 1e-6 * s(0);
}

struct MultistartOutcome {
  LmOutcome best;
  std::size_t best_index = 0;
  std::size_t converged = 0;
};

// `f` takes log coordinates.
MultistartOutcome run_multistart(const ResidualFunction& f, const SearchBox& box, const FitOptions& options) {
  if (options.starts == 0) throw std::invalid_argument("at least one multistart is required");
  const auto starts = multistart_points(box, options.starts, options.seed);
  std::vector<LmOutcome> outcomes(starts.size());
  parallel_for(starts.size(), options.jobs, [&](std::size_t i) {
    std::vector<double> x0(starts[i].size());
    for (std::size_t j = 0; j < x0.size(); ++j) x0[j] = std::log(starts[i][j]);
    outcomes[i] = levenberg_marquardt(f, std::move(x0), options.lm);
  });
  MultistartOutcome out;
  bool found = false;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].converged) ++out.converged;
    if (!std::isfinite(outcomes[i].rss)) continue;
    if (!found || outcomes[i].rss < out.best.rss) {
      out.best = outcomes[i];
      out.best_index = i;
      found = true;
    }
  }
  if (!found) throw std::runtime_error("fit failed: no multistart produced a finite residual");
  return out;
}

std::vector<double> exp_all(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::exp(x); });
  return out;
}

void fill_residuals(FitResult& fit) {
  fit.residuals.resize(fit.observed.size());
  fit.rss = 0.0;
  for (std::size_t i = 0; i < fit.observed.size(); ++i) {
    fit.residuals[i] = fit.predicted[i] - fit.observed[i];
    fit.rss += fit.residuals[i] * fit.residuals[i];
  }
}

}  // namespace

FitResult fit_lysis_curve(const std::vector<LysisDataPoint>& data, const AssayConfig& config,
                          const FitOptions& options) {
  config.validate();
  const auto kind = config.form.kind();
  const std::size_t n = TrophicForm::coefficient_count(kind);
  if (data.size() < n) {
    throw std::invalid_argument("need at least " + std::to_string(n) + " data points to fit the " +
                                std::string(TrophicForm::kind_name(kind)) + " form");
  }
  for (const auto& d : data) {
    if (!(d.ratio >= 0.0) || !(d.fraction >= 0.0) || !(d.fraction <= 1.0)) {
      throw std::invalid_argument("lysis data must have ratio >= 0 and fraction in [0, 1]");
    }
  }

  FitResult fit;
  fit.model = std::string(TrophicForm::kind_name(kind));
  fit.names = TrophicForm::coefficient_names(kind, config.kind == AssayKind::treg_kills_nk);
  for (const auto& d : data) fit.observed.push_back(d.fraction);
  const SearchBox box = options.box.value_or(default_lysis_box(config.kind, kind));
  validate_box(box);
  if (box.lo.size() != n) throw std::invalid_argument("search box dimension does not match the form");

  auto predict = [&](const std::vector<double>& coeffs, std::vector<double>& out) {
    const AssayConfig c = config.with_coefficients(coeffs);
    out.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = percent_specific_lysis(c, data[i].ratio);
  };

  if (std::all_of(data.begin(), data.end(), [](const LysisDataPoint& d) { return d.fraction == 0.0; })) {
    // Nothing was killed: the magnitude sits on its zero bound and the other
    // coefficients are arbitrary.
    fit.parameters.resize(n);
    fit.parameters[0] = 0.0;
    for (std::size_t j = 1; j < n; ++j) fit.parameters[j] = std::sqrt(box.lo[j] * box.hi[j]);
    predict(fit.parameters, fit.predicted);
    fill_residuals(fit);
    fit.converged = true;
    fit.degenerate = true;
    fit.starts = 0;
    return fit;
  }

  const ResidualFunction residuals = [&](const std::vector<double>& log_x, std::vector<double>& r) {
    const auto x = exp_all(log_x);
    for (double v : x) {
      if (!std::isfinite(v) || v <= 0.0) return false;
    }
    try {
      predict(x, r);
    } catch (const std::exception&) {
      return false;
    }
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= data[i].fraction;
    return true;
  };

  const MultistartOutcome ms = run_multistart(residuals, box, options);
  fit.parameters = exp_all(ms.best.x);
  predict(fit.parameters, fit.predicted);
  fill_residuals(fit);
  fit.converged = ms.best.converged;
  fit.starts = options.starts;
  fit.converged_starts = ms.converged;
  fit.iterations = ms.best.iterations;
  fit.best_start = ms.best_index;
  fit.degenerate = poorly_identified(residuals, ms.best.x, data.size());
  return fit;
}

FitResult fit_nk_apoptosis_curve(const std::vector<LysisDataPoint>& data, const AssayConfig& config,
                                 const FitOptions& options) {
  if (config.kind != AssayKind::treg_kills_nk) throw std::invalid_argument("NK apoptosis fits need the Treg->NK assay");
  return fit_lysis_curve(data, config, options);
}

// ---------------------------------------------------------------------------
// Growth

std::string_view growth_model_name(GrowthModel m) { return m == GrowthModel::logistic ? "logistic" : "gompertz"; }

std::optional<GrowthModel> growth_model_from_name(std::string_view name) {
  if (name == "logistic") return GrowthModel::logistic;
  if (name == "gompertz") return GrowthModel::gompertz;
  return std::nullopt;
}

double gompertz_closed_form(double p0, double r, double K, double t) {
  if (!(p0 >= 0.0)) throw std::domain_error("initial population must be >= 0");
  if (!(K > 0.0)) throw std::domain_error("carrying capacity must be > 0");
  if (p0 == 0.0) return 0.0;
  return K * std::exp(std::log(p0 / K) * std::exp(-r * t));
}

double growth_curve(GrowthModel m, double p0, double r, double K, double t) {
  if (m == GrowthModel::gompertz) return gompertz_closed_form(p0, r, K, t);
  if (!(p0 >= 0.0)) throw std::domain_error("initial population must be >= 0");
  if (!(K > 0.0)) throw std::domain_error("carrying capacity must be > 0");
  return K * p0 / (p0 + (K - p0) * std::exp(-r * t));
}

FitResult fit_growth_model(const std::vector<GrowthDataPoint>& data, GrowthModel model,
                           const GrowthFitOptions& options) {
  if (data.size() < 3) throw std::invalid_argument("growth fits need at least 3 data points");
  std::vector<GrowthDataPoint> pts = data;
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  for (const auto& p : pts) {
    if (!(p.t >= 0.0) || !(p.cells >= 0.0)) throw std::invalid_argument("growth data must be nonnegative");
  }
  const double t0 = pts.front().t;
  const double first = pts.front().cells, last = pts.back().cells;
  double lo = first, hi = first, mean = 0.0;
  for (const auto& p : pts) {
    lo = std::min(lo, p.cells);
    hi = std::max(hi, p.cells);
    mean += p.cells / static_cast<double>(pts.size());
  }

  FitResult fit;
  fit.model = std::string(growth_model_name(model));
  fit.names = {"r", "K", "p0"};
  for (const auto& p : pts) fit.observed.push_back(p.cells);

  if (hi - lo <= 1e-9 * hi) {
    // Flat trajectory: the population sits at capacity and r cannot be seen.
    fit.parameters = {0.0, mean, mean};
    fit.predicted.assign(pts.size(), mean);
    fill_residuals(fit);
    fit.converged = true;
    fit.degenerate = true;
    return fit;
  }
  if (!(last > first)) throw std::invalid_argument("growth data must increase from the first to the last point");
  if (!options.fit_initial && !(first > 0.0)) throw std::invalid_argument("cannot pin p0 to a zero first observation");

  const double p0_ref = first > 0.0 ? first : std::max(hi * 1e-6, 1.0);
  const bool fit_p0 = options.fit_initial;
  // Residuals relative to the largest observation keep the scale near 1.
  const double scale = hi;

  const ResidualFunction residuals = [&](const std::vector<double>& log_x, std::vector<double>& r) {
    const double rate = std::exp(log_x[0]), K = std::exp(log_x[1]);
    const double p0 = fit_p0 ? std::exp(log_x[2]) : first;
    if (!std::isfinite(rate) || !std::isfinite(K) || !std::isfinite(p0) || !(K > 0.0)) return false;
    r.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      r[i] = (growth_curve(model, p0, rate, K, pts[i].t - t0) - pts[i].cells) / scale;
      if (!std::isfinite(r[i])) return false;
    }
    return true;
  };

  SearchBox box;
  if (options.fit.box) {
    box = *options.fit.box;
  } else {
    box.lo = {1e-3, 0.5 * hi};
    box.hi = {2.0, 10.0 * hi};
    if (fit_p0) {
      box.lo.push_back(0.2 * p0_ref);
      box.hi.push_back(5.0 * p0_ref);
    }
  }
  validate_box(box);
  if (box.lo.size() != (fit_p0 ? 3u : 2u)) throw std::invalid_argument("growth search box has the wrong dimension");

  const MultistartOutcome ms = run_multistart(residuals, box, options.fit);
  const auto x = exp_all(ms.best.x);
  fit.parameters = {x[0], x[1], fit_p0 ? x[2] : first};
  for (const auto& p : pts) fit.predicted.push_back(growth_curve(model, fit.parameters[2], x[0], x[1], p.t - t0));
  fill_residuals(fit);
  fit.converged = ms.best.converged;
  fit.starts = options.fit.starts;
  fit.converged_starts = ms.converged;
  fit.iterations = ms.best.iterations;
  fit.best_start = ms.best_index;
  fit.degenerate = poorly_identified(residuals, ms.best.x, pts.size());
  return fit;
}

// ---------------------------------------------------------------------------
// Reports

std::string format_fit_report(const FitResult& fit) {
  std::string out;
  auto kv = [&](std::string_view k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  };
  kv("model", fit.model);
  for (std::size_t i = 0; i < fit.names.size(); ++i) kv(fit.names[i], format_double(fit.parameters[i]));
  kv("rss", format_double(fit.rss));
  kv("points", std::to_string(fit.observed.size()));
  kv("converged", fit.converged ? "true" : "false");
  kv("degenerate", fit.degenerate ? "true" : "false");
  kv("starts", std::to_string(fit.starts));
  kv("converged_starts", std::to_string(fit.converged_starts));
  kv("best_start", std::to_string(fit.best_start));
  kv("iterations", std::to_string(fit.iterations));
  return out;
}

std::string format_residual_csv(const FitResult& fit, const std::vector<double>& x, std::string_view x_name) {
  if (x.size() != fit.observed.size()) throw std::invalid_argument("x values do not match the fitted data");
  std::string out(x_name);
  out += ",observed,predicted,residual\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out += format_double(x[i]) + ',' + format_double(fit.observed[i]) + ',' + format_double(fit.predicted[i]) + ',' +
           format_double(fit.residuals[i]) + '\n';
  }
  return out;
}

}  // namespace bcim
