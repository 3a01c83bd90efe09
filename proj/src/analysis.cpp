#include "bcim/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bcim/parallel.hpp"
#include "bcim/text.hpp"

namespace bcim {

namespace {

constexpr std::size_t iT = 0, iN = 1, iC = 2, iH = 3, iR = 4, iB = 5, iBT = 6;

// Lambda / theta_H = theta_N + gamma_N R*^delta_N - kappa H*.
double nk_net_loss(const ModelParameters& P, double R, double H) {
  return P[Param::theta_N] + P[Param::gamma_N] * std::pow(R, P[Param::delta_N]) - P[Param::kappa] * H;
}

double cd8_net_loss(const ModelParameters& P, double R, double H) {
  return P[Param::theta_C] + P[Param::gamma_C] * R - P[Param::eta_1] * H / (P[Param::eta_2] + H);
}

void require_positive_rate(const ModelParameters& P, Param p) {
  if (!(P[p] > 0.0)) {
    throw std::domain_error("zero-tumor equilibrium needs " + std::string(param_name(p)) + " > 0");
  }
}

}  // namespace

ModelState zero_tumor_equilibrium(const ModelParameters& P) {
  for (Param p : {Param::theta_R, Param::theta_B, Param::theta_H}) require_positive_rate(P, p);
  ModelState e;
  e.R = P[Param::sigma_R] / P[Param::theta_R];
  e.B = P[Param::sigma_B] / P[Param::theta_B];
  e.H = P[Param::sigma_H] / P[Param::theta_H];
  const double nk = nk_net_loss(P, e.R, e.H);
  if (!(nk > 0.0)) throw std::domain_error("no admissible zero-tumor equilibrium: NK denominator is not positive");
  const double cd8 = cd8_net_loss(P, e.R, e.H);
  if (!(cd8 > 0.0)) throw std::domain_error("no admissible zero-tumor equilibrium: CD8 denominator is not positive");
  e.N = P[Param::sigma_N] / nk;
  e.C = P[Param::sigma_C] / cd8;
  return e;
}

CellMatrix jacobian_zero_tumor(const ModelParameters& P) {
  const ModelState e = zero_tumor_equilibrium(P);
  CellMatrix J{};
  const double dN = P[Param::delta_N];

  J[iT][iT] = P[Param::a] - P[Param::c] * std::exp(-P[Param::lambda_R] * e.R) - P[Param::d];

  J[iN][iT] = -P[Param::p] * e.N;
  J[iN][iN] = -nk_net_loss(P, e.R, e.H);
  J[iN][iH] = P[Param::kappa] * e.N;
  J[iN][iR] = e.R > 0.0 ? -P[Param::gamma_N] * dN * std::pow(e.R, dN - 1.0) * e.N : 0.0;

  J[iC][iT] = -P[Param::q] * e.C + P[Param::r] * e.N + P[Param::j_C] / P[Param::k_C] * e.C;
  J[iC][iC] = -cd8_net_loss(P, e.R, e.H);
  const double eh = P[Param::eta_2] + e.H;
  J[iC][iH] = P[Param::eta_1] * P[Param::eta_2] / (eh * eh) * e.C;
  J[iC][iR] = -P[Param::gamma_C] * e.C;

  J[iH][iT] = P[Param::j_H] / P[Param::k_H] * e.B * e.H;
  J[iH][iH] = -P[Param::theta_H];
  J[iH][iBT] = -P[Param::c_1] * e.H;

  J[iR][iR] = -P[Param::theta_R];
  J[iR][iBT] = P[Param::c_1] * e.H;

  J[iB][iT] = -P[Param::c_2] * e.B;
  J[iB][iB] = -P[Param::theta_B];

  J[iBT][iT] = P[Param::c_2] * e.B;
  J[iBT][iBT] = -P[Param::theta_BT];
  return J;
}

std::array<double, kCellComponents> eigenvalues_zero_tumor(const ModelParameters& P) {
  const ModelState e = zero_tumor_equilibrium(P);
  return {P[Param::a] - P[Param::c] * std::exp(-P[Param::lambda_R] * e.R) - P[Param::d],
          -P[Param::theta_B],
          -P[Param::theta_BT],
          -P[Param::theta_H],
          -P[Param::theta_R],
          -cd8_net_loss(P, e.R, e.H),
          -nk_net_loss(P, e.R, e.H)};
}

std::vector<std::complex<double>> numeric_eigenvalues(const CellMatrix& m) {
  Eigen::Matrix<double, 7, 7> A;
  for (std::size_t i = 0; i < kCellComponents; ++i)
    for (std::size_t j = 0; j < kCellComponents; ++j) A(int(i), int(j)) = m[i][j];
  const Eigen::EigenSolver<Eigen::Matrix<double, 7, 7>> solver(A, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation did not converge");
  std::vector<std::complex<double>> out;
  for (int i = 0; i < 7; ++i) out.push_back(solver.eigenvalues()(i));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

StabilityReport stability_report(const ModelParameters& params) {
  StabilityReport rep;
  rep.equilibrium = zero_tumor_equilibrium(params);
  rep.eigenvalues = eigenvalues_zero_tumor(params);
  rep.numeric = numeric_eigenvalues(jacobian_zero_tumor(params));

  const bool all_real = std::all_of(rep.numeric.begin(), rep.numeric.end(), [](const auto& z) {
    return std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z.real()));
  });
  if (all_real) {
    auto closed = rep.eigenvalues;
    std::sort(closed.begin(), closed.end());
    rep.closed_form_checked = true;
    for (std::size_t i = 0; i < closed.size(); ++i) {
      const double a = closed[i], b = rep.numeric[i].real();
      const double denom = std::max({std::abs(a), std::abs(b), 1e-300});
      rep.closed_form_mismatch = std::max(rep.closed_form_mismatch, std::abs(a - b) / denom);
    }
    if (rep.closed_form_mismatch > 1e-6) rep.warning = "closed-form and numeric spectra disagree";
  } else {
    rep.warning = "numeric spectrum has complex eigenvalues; closed-form comparison skipped";
  }

  rep.stable = std::all_of(rep.numeric.begin(), rep.numeric.end(), [](const auto& z) { return z.real() < 0.0; });
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
    if (!(rep.eigenvalues[i] < 0.0)) rep.destabilizing.push_back(i + 1);
  }
  return rep;
}

std::string format_stability_report(const StabilityReport& rep) {
  std::string out = "equilibrium:\n";
  const auto e = rep.equilibrium.to_array();
  for (std::size_t i = 0; i < kStateSize; ++i) {
    out += "  " + std::string(kComponentNames[i]) + " = " + format_double(e[i]) + '\n';
  }
  out += "eigenvalues (closed form):\n";
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
    out += "  lambda_" + std::to_string(i + 1) + " = " + format_double(rep.eigenvalues[i]) + '\n';
  }
  out += "eigenvalues (numeric):\n";
  for (const auto& z : rep.numeric) {
    out += "  " + format_double(z.real());
    if (z.imag() != 0.0) out += (z.imag() > 0 ? " + " : " - ") + format_double(std::abs(z.imag())) + "i";
    out += '\n';
  }
  if (rep.closed_form_checked) out += "max relative mismatch = " + format_double(rep.closed_form_mismatch) + '\n';
  if (!rep.warning.empty()) out += "warning: " + rep.warning + '\n';
  out += std::string("verdict = ") + (rep.stable ? "locally asymptotically stable" : "unstable") + '\n';
  if (!rep.destabilizing.empty()) {
    out += "destabilizing =";
    for (auto i : rep.destabilizing) out += " lambda_" + std::to_string(i);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

ThresholdResult max_beatable_tumor(const ModelParameters& params, const ModelState& base_ic,
                                   const DoseSchedule& schedule, const ThresholdOptions& opt) {
  if (!(opt.lower > 0.0) || !(opt.upper > opt.lower)) throw std::invalid_argument("threshold bracket must satisfy 0 < lower < upper");
  if (!(opt.resolution > 0.0)) throw std::invalid_argument("threshold resolution must be positive");
  if (!(opt.horizon > 0.0)) throw std::invalid_argument("threshold horizon must be positive");

  ThresholdResult res;
  auto probe_all = [&](const std::vector<double>& starts) {
    std::vector<ThresholdProbe> out(starts.size());
    parallel_for(starts.size(), opt.jobs, [&](std::size_t i) {
      const ModelState ic = base_ic.with(Component::T, starts[i]);
      const double final_T = integrate_final(ic, params, schedule, 0.0, opt.horizon, opt.solver).T;
      out[i] = {starts[i], final_T, final_T < opt.extinct_below};
    });
    res.probes.insert(res.probes.end(), out.begin(), out.end());
    return out;
  };

  const auto ends = probe_all({opt.lower, opt.upper});
  if (!ends[0].beaten || ends[1].beaten) {
    throw std::runtime_error("threshold bracket does not straddle the outcome: T0 = " + format_double(opt.lower) +
                             (ends[0].beaten ? " is beaten" : " persists") + ", T0 = " + format_double(opt.upper) +
                             (ends[1].beaten ? " is beaten" : " persists"));
  }
  double lo = opt.lower, hi = opt.upper;
  const std::size_t k = std::max<std::size_t>(1, resolve_jobs(opt.jobs));
  while (hi - lo > opt.resolution) {
    // Split geometrically while the bracket spans more than a factor of two.
    const bool geometric = hi > 2.0 * lo;
    std::vector<double> pts;
    for (std::size_t i = 1; i <= k; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(k + 1);
      pts.push_back(geometric ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo));
    }
    const auto out = probe_all(pts);
    double new_lo = lo, new_hi = hi;
    for (const auto& p : out) {
      if (p.beaten) {
        new_lo = p.initial_tumor;
      } else {
        new_hi = p.initial_tumor;
        break;
      }
    }
    lo = new_lo;
    hi = new_hi;
  }
  res.threshold = res.beaten = lo;
  res.survives = hi;
  return res;
}

// ---------------------------------------------------------------------------

const SensitivityEntry& SensitivityReport::entry(Param p) const {
  for (const auto& e : entries) {
    if (e.param == p) return e;
  }
  throw std::out_of_range("sensitivity report has no entry for " + std::string(param_name(p)));
}

std::vector<SensitivityEntry> SensitivityReport::ranked() const {
  auto out = entries;
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return std::abs(a.plus_pct) > std::abs(b.plus_pct); });
  return out;
}

SensitivityReport sensitivity_scan(const ModelParameters& params, const ModelState& ic, double horizon,
                                   const SensitivityOptions& options) {
  if (!(horizon > 0.0)) throw std::invalid_argument("sensitivity horizon must be positive");
  if (!(options.perturbation > 0.0 && options.perturbation < 1.0)) {
    throw std::invalid_argument("perturbation must lie in (0, 1)");
  }
  SensitivityReport rep;
  rep.horizon = horizon;
  rep.perturbation = options.perturbation;
  rep.baseline_final_tumor = integrate_final(ic, params, options.schedule, 0.0, horizon, options.solver).T;
  if (!(rep.baseline_final_tumor > 0.0)) {
    throw std::runtime_error("baseline final tumor is zero; percent changes are undefined");
  }

  const auto all = all_params();
  std::vector<double> finals(2 * all.size());
  parallel_for(finals.size(), options.jobs, [&](std::size_t i) {
    const Param p = all[i / 2];
    const double factor = i % 2 == 0 ? 1.0 + options.perturbation : 1.0 - options.perturbation;
    try {
      finals[i] = integrate_final(ic, params.with(p, params[p] * factor), options.schedule, 0.0, horizon,
                                  options.solver)
                      .T;
    } catch (const std::exception& e) {
      throw std::runtime_error("sensitivity run for " + std::string(param_name(p)) + " failed: " + e.what());
    }
  });
  for (std::size_t j = 0; j < all.size(); ++j) {
    auto pct = [&](double v) { return 100.0 * (v - rep.baseline_final_tumor) / rep.baseline_final_tumor; };
    rep.entries.push_back({all[j], pct(finals[2 * j]), pct(finals[2 * j + 1])});
  }
  return rep;
}

std::string format_sensitivity_csv(const SensitivityReport& report) {
  std::string out = "parameter,plus_pct,minus_pct\n";
  for (const auto& e : report.ranked()) {
    out += std::string(param_name(e.param)) + ',' + format_double(e.plus_pct) + ',' + format_double(e.minus_pct) + '\n';
  }
  return out;
}

}  // namespace bcim
