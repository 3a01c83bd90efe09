#include "bcim/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bcim {

std::optional<Component> component_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kStateSize; ++i) {
    if (kComponentNames[i] == name) return static_cast<Component>(i);
  }
  return std::nullopt;
}

ModelState ModelState::with(Component c, double value) const {
  StateVector v = to_array();
  v[static_cast<std::size_t>(c)] = value;
  return from_array(v);
}

bool ModelState::in_domain() const {
  const StateVector v = to_array();
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x) && x >= 0.0; });
}

std::optional<Param> param_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (kParamNames[i] == name) return static_cast<Param>(i);
  }
  return std::nullopt;
}

std::array<Param, kParamCount> all_params() {
  std::array<Param, kParamCount> out{};
  for (std::size_t i = 0; i < kParamCount; ++i) out[i] = static_cast<Param>(i);
  return out;
}

// ---------------------------------------------------------------------------

double PartialParameters::get(Param p) const {
  const auto& v = values_[idx(p)];
  if (!v) throw std::out_of_range("parameter '" + std::string(param_name(p)) + "' is not set");
  return *v;
}

PartialParameters& PartialParameters::set(Param p, double v) {
  values_[idx(p)] = v;
  return *this;
}

PartialParameters& PartialParameters::erase(Param p) {
  values_[idx(p)].reset();
  return *this;
}

std::vector<Param> PartialParameters::missing() const {
  std::vector<Param> out;
  for (Param p : all_params()) {
    if (!has(p)) out.push_back(p);
  }
  return out;
}

namespace {

bool strictly_positive_required(Param p) {
  return p == Param::delta || p == Param::l || p == Param::delta_N || p == Param::b;
}

void validate(const std::array<double, kParamCount>& values) {
  for (Param p : all_params()) {
    const double v = values[static_cast<std::size_t>(p)];
    if (!std::isfinite(v) || v < 0.0 || (strictly_positive_required(p) && v == 0.0)) {
      std::ostringstream msg;
      msg << "invalid value for parameter '" << param_name(p) << "': " << v;
      throw std::invalid_argument(msg.str());
    }
  }
}

std::array<double, kParamCount> complete(const PartialParameters& partial) {
  const auto missing = partial.missing();
  if (!missing.empty()) {
    std::string names;
    for (Param p : missing) {
      if (!names.empty()) names += ", ";
      names += param_name(p);
    }
    throw std::invalid_argument("missing parameters: " + names);
  }
  std::array<double, kParamCount> out{};
  for (Param p : all_params()) out[static_cast<std::size_t>(p)] = partial.get(p);
  return out;
}

}  // namespace

ModelParameters::ModelParameters(const std::array<double, kParamCount>& values) : values_(values) {
  validate(values_);
}

ModelParameters::ModelParameters(const PartialParameters& partial) : ModelParameters(complete(partial)) {}

ModelParameters ModelParameters::with(Param p, double value) const {
  auto v = values_;
  v[static_cast<std::size_t>(p)] = value;
  return ModelParameters(v);
}

PartialParameters ModelParameters::to_partial() const {
  PartialParameters out;
  for (Param p : all_params()) out.set(p, (*this)[p]);
  return out;
}

// ---------------------------------------------------------------------------

TrophicForm::TrophicForm(Kind kind, std::vector<double> coefficients)
    : kind_(kind), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != coefficient_count(kind_)) {
    std::ostringstream msg;
    msg << kind_name(kind_) << " form takes " << coefficient_count(kind_) << " coefficients, got "
        << coefficients_.size();
    throw std::invalid_argument(msg.str());
  }
}

std::size_t TrophicForm::coefficient_count(Kind kind) { return kind == Kind::rational_hill ? 3 : 2; }

std::string_view TrophicForm::kind_name(Kind kind) {
  switch (kind) {
    case Kind::power: return "power";
    case Kind::rational_hill: return "rational";
    case Kind::michaelis_menten: return "michaelis-menten";
  }
  return "?";
}

std::optional<TrophicForm::Kind> TrophicForm::kind_from_name(std::string_view name) {
  if (name == "power") return Kind::power;
  if (name == "rational" || name == "rational-hill") return Kind::rational_hill;
  if (name == "michaelis-menten" || name == "mm") return Kind::michaelis_menten;
  return std::nullopt;
}

std::vector<std::string> TrophicForm::coefficient_names(Kind kind, bool nk_assay) {
  if (nk_assay) {
    if (kind == Kind::rational_hill) return {"gamma_N", "delta_N", "s_R"};
    return {"gamma_N", "delta_N"};
  }
  if (kind == Kind::rational_hill) return {"c", "delta", "s_N"};
  return {"c", "delta"};
}

double TrophicForm::rate(double prey, double predator) const {
  const double m = coefficients_[0];
  const double e = coefficients_[1];
  switch (kind_) {
    case Kind::power:
      return m * std::pow(predator, e);
    case Kind::rational_hill: {
      if (predator <= 0.0) return 0.0;
      const double s = coefficients_[2];
      return m / (1.0 + s * std::pow(prey / predator, e));
    }
    case Kind::michaelis_menten:
      return predator <= 0.0 ? 0.0 : m * predator / (e + predator);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

namespace {

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0)) throw std::domain_error(std::string(what) + " must be nonnegative");
}

// Ratio-dependent Hill saturation effector^n / (s * prey^n + effector^n),
// written in the ratio prey/effector. Defined as 0 when effector == 0.
inline double hill_ratio(double prey, double effector, double s, double n) {
  if (effector == 0.0) return 0.0;
  return 1.0 / (1.0 + s * std::pow(prey / effector, n));
}

}  // namespace

double nk_lysis_fraction(double T, double N, double R, const ModelParameters& params) {
  require_nonnegative(T, "T");
  require_nonnegative(N, "N");
  require_nonnegative(R, "R");
  return params[Param::c] * std::exp(-params[Param::lambda_R] * R) *
         hill_ratio(T, N, params[Param::s_N], params[Param::delta]);
}

double cd8_lysis_fraction(double T, double C, const ModelParameters& params) {
  require_nonnegative(T, "T");
  require_nonnegative(C, "C");
  return params[Param::d] * hill_ratio(T, C, params[Param::s_C], params[Param::l]);
}

void rhs_into(const StateVector& y, const ModelParameters& P, double v, StateVector& dydt) {
  const double T = y[0], N = y[1], C = y[2], H = y[3], R = y[4], B = y[5], BT = y[6], X = y[7];

  const double nk = P[Param::c] * std::exp(-P[Param::lambda_R] * R) * hill_ratio(T, N, P[Param::s_N], P[Param::delta]);
  const double cd8 = P[Param::d] * hill_ratio(T, C, P[Param::s_C], P[Param::l]);
  const double h_to_treg = P[Param::c_1] * H * BT;
  const double b_to_tbreg = P[Param::c_2] * T * B;
  // Conversion fluxes go last so they cancel in dH + dR and dB + dB_T up to
  // the final rounding.

  dydt[0] = P[Param::a] * T * (1.0 - P[Param::b] * T) - nk * T - cd8 * T;
  dydt[1] = P[Param::sigma_N] - P[Param::theta_N] * N - P[Param::p] * T * N -
            P[Param::gamma_N] * std::pow(R, P[Param::delta_N]) * N + P[Param::kappa] * H * N;
  dydt[2] = P[Param::sigma_C] - P[Param::theta_C] * C - P[Param::q] * T * C - P[Param::gamma_C] * R * C +
            P[Param::r] * N * T + P[Param::j_C] * T / (P[Param::k_C] + T) * C +
            P[Param::eta_1] * H / (P[Param::eta_2] + H) * C;
  dydt[3] = P[Param::sigma_H] - P[Param::theta_H] * H + P[Param::j_H] * T / (P[Param::k_H] + T) * B * H - h_to_treg;
  dydt[4] = P[Param::sigma_R] - P[Param::theta_R] * R + h_to_treg;
  dydt[5] = P[Param::sigma_B] - P[Param::theta_B] * B - P[Param::gamma_B] * X * X * B - b_to_tbreg;
  dydt[6] = -P[Param::theta_BT] * BT + b_to_tbreg;
  dydt[7] = -P[Param::theta_X] * X + v;
}

ModelState rhs(const ModelState& state, const ModelParameters& params, double dose_rate) {
  if (!state.in_domain()) throw std::domain_error("rhs: state has negative or non-finite components");
  require_nonnegative(dose_rate, "dose rate");
  StateVector out{};
  rhs_into(state.to_array(), params, dose_rate, out);
  return ModelState::from_array(out);
}

JacobianMatrix rhs_jacobian(const StateVector& y, const ModelParameters& P) {
  const double T = y[0], N = y[1], C = y[2], H = y[3], R = y[4], B = y[5], BT = y[6], X = y[7];
  JacobianMatrix J{};
  enum : std::size_t { iT, iN, iC, iH, iR, iB, iBT, iX };

  // Tumor row. With u = s (T/E)^n and phi = 1/(1+u):
  //   d(T phi)/dT = phi - n u phi^2,  d(T phi)/dE = n u phi^2 T/E.
  const double inhibition = P[Param::c] * std::exp(-P[Param::lambda_R] * R);
  double phiN = 0.0, dTphiN_dT = 0.0, dTphiN_dN = 0.0;
  if (N > 0.0) {
    const double u = P[Param::s_N] * std::pow(T / N, P[Param::delta]);
    phiN = 1.0 / (1.0 + u);
    dTphiN_dT = phiN - P[Param::delta] * u * phiN * phiN;
    dTphiN_dN = P[Param::delta] * u * phiN * phiN * T / N;
  }
  double phiC = 0.0, dTphiC_dT = 0.0, dTphiC_dC = 0.0;
  if (C > 0.0) {
    const double u = P[Param::s_C] * std::pow(T / C, P[Param::l]);
    phiC = 1.0 / (1.0 + u);
    dTphiC_dT = phiC - P[Param::l] * u * phiC * phiC;
    dTphiC_dC = P[Param::l] * u * phiC * phiC * T / C;
  }
  J[iT][iT] = P[Param::a] * (1.0 - 2.0 * P[Param::b] * T) - inhibition * dTphiN_dT - P[Param::d] * dTphiC_dT;
  J[iT][iN] = -inhibition * dTphiN_dN;
  J[iT][iC] = -P[Param::d] * dTphiC_dC;
  J[iT][iR] = P[Param::lambda_R] * inhibition * phiN * T;

  const double r_pow = std::pow(R, P[Param::delta_N]);
  J[iN][iT] = -P[Param::p] * N;
  J[iN][iN] = -P[Param::theta_N] - P[Param::p] * T - P[Param::gamma_N] * r_pow + P[Param::kappa] * H;
  J[iN][iH] = P[Param::kappa] * N;
  J[iN][iR] = R > 0.0 ? -P[Param::gamma_N] * P[Param::delta_N] * r_pow / R * N : 0.0;

  const double kc_T = P[Param::k_C] + T;
  const double e2_H = P[Param::eta_2] + H;
  J[iC][iT] = -P[Param::q] * C + P[Param::r] * N + P[Param::j_C] * P[Param::k_C] / (kc_T * kc_T) * C;
  J[iC][iN] = P[Param::r] * T;
  J[iC][iC] = -P[Param::theta_C] - P[Param::q] * T - P[Param::gamma_C] * R + P[Param::j_C] * T / kc_T +
              P[Param::eta_1] * H / e2_H;
  J[iC][iH] = P[Param::eta_1] * P[Param::eta_2] / (e2_H * e2_H) * C;
  J[iC][iR] = -P[Param::gamma_C] * C;

  const double kh_T = P[Param::k_H] + T;
  J[iH][iT] = P[Param::j_H] * P[Param::k_H] / (kh_T * kh_T) * B * H;
  J[iH][iH] = -P[Param::theta_H] + P[Param::j_H] * T / kh_T * B - P[Param::c_1] * BT;
  J[iH][iB] = P[Param::j_H] * T / kh_T * H;
  J[iH][iBT] = -P[Param::c_1] * H;

  J[iR][iH] = P[Param::c_1] * BT;
  J[iR][iR] = -P[Param::theta_R];
  J[iR][iBT] = P[Param::c_1] * H;

  J[iB][iT] = -P[Param::c_2] * B;
  J[iB][iB] = -P[Param::theta_B] - P[Param::c_2] * T - P[Param::gamma_B] * X * X;
  J[iB][iX] = -2.0 * P[Param::gamma_B] * X * B;

  J[iBT][iT] = P[Param::c_2] * B;
  J[iBT][iB] = P[Param::c_2] * T;
  J[iBT][iBT] = -P[Param::theta_BT];

  J[iX][iX] = -P[Param::theta_X];
  return J;
}

bool clamp_to_domain(StateVector& y, std::span<const double, kStateSize> scale, double tol) {
  for (std::size_t i = 0; i < kStateSize; ++i) {
    if (!std::isfinite(y[i])) return false;
    if (y[i] < 0.0 && y[i] < -tol * std::max(scale[i], 1.0)) return false;
  }
  for (double& v : y) v = std::max(v, 0.0);
  return true;
}

}  // namespace bcim
