#include "bcim/homeostasis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bcim {

ModelState HomeostasisState::to_model_state() const {
  const auto& v = values;
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], 0.0};
}

double half_life_to_rate(double half_life_days) {
  if (!(half_life_days > 0.0)) throw std::domain_error("half-life must be positive");
  return std::numbers::ln2 / half_life_days;
}

double in_vitro_death_rate(double t_final_days, double reduction_fraction) {
  if (!(t_final_days > 0.0)) throw std::domain_error("culture time must be positive");
  if (!(reduction_fraction >= 0.0 && reduction_fraction < 1.0)) {
    throw std::domain_error("reduction fraction must lie in [0, 1)");
  }
  return std::log(1.0 / (1.0 - reduction_fraction)) / t_final_days;
}

HomeostasisState zero_tumor_state() {
  return {HomeostasisState::Label::zero_tumor, {0.0, 3.38e9, 1.263e5, 2.76e9, 2.4e8, 8e8, 0.0}};
}

HomeostasisState high_tumor_state() {
  return {HomeostasisState::Label::high_tumor, {1e10, 1.25e9, 2.634e6, 2.55621e9, 5.0879e8, 7.67e8, 3.34e7}};
}

std::array<std::pair<Param, double>, 11> DerivedParameters::entries() const {
  return {{{Param::sigma_H, sigma_H},
           {Param::sigma_R, sigma_R},
           {Param::sigma_B, sigma_B},
           {Param::kappa, kappa},
           {Param::p, p},
           {Param::eta_1, eta_1},
           {Param::r, r},
           {Param::c_1, c_1},
           {Param::j_H, j_H},
           {Param::c_2, c_2},
           {Param::theta_BT, theta_BT}}};
}

PartialParameters DerivedParameters::merged_into(PartialParameters literature) const {
  for (const auto& [param, value] : entries()) literature.set(param, value);
  return literature;
}

bool is_derived_parameter(Param p) {
  switch (p) {
    case Param::sigma_H:
    case Param::sigma_R:
    case Param::sigma_B:
    case Param::kappa:
    case Param::p:
    case Param::eta_1:
    case Param::r:
    case Param::c_1:
    case Param::j_H:
    case Param::c_2:
    case Param::theta_BT:
      return true;
    default:
      return false;
  }
}

std::vector<Param> literature_parameter_names() {
  std::vector<Param> out;
  for (Param p : all_params()) {
    if (!is_derived_parameter(p)) out.push_back(p);
  }
  return out;
}

namespace {

double positive(double v, std::string_view name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << "derived " << name << " = " << v << " is not positive; homeostasis inputs are inconsistent";
    throw std::domain_error(msg.str());
  }
  return v;
}

}  // namespace

DerivedParameters derive_parameters(const HomeostasisState& e0, const HomeostasisState& e1,
                                    const PartialParameters& literature) {
  std::string missing;
  for (Param p : literature_parameter_names()) {
    if (!literature.has(p)) missing += (missing.empty() ? "" : ", ") + std::string(param_name(p));
  }
  if (!missing.empty()) throw std::invalid_argument("literature parameters missing: " + missing);
  auto L = [&](Param p) { return literature.get(p); };

  const double N0 = e0[Component::N], C0 = e0[Component::C], H0 = e0[Component::H], R0 = e0[Component::R],
               B0 = e0[Component::B];
  const double T1 = e1[Component::T], N1 = e1[Component::N], C1 = e1[Component::C], H1 = e1[Component::H],
               R1 = e1[Component::R], B1 = e1[Component::B], BT1 = e1[Component::B_T];

  DerivedParameters d{};

  // Zero-tumor equilibrium: the source terms balance natural death.
  d.sigma_H = positive(L(Param::theta_H) * H0, "sigma_H");
  d.sigma_R = positive(L(Param::theta_R) * R0, "sigma_R");
  d.sigma_B = positive(L(Param::theta_B) * B0, "sigma_B");

  // 0 = sigma_N - theta_N N0 - gamma_N R0^delta_N N0 + kappa H0 N0
  const double treg_kill0 = L(Param::gamma_N) * std::pow(R0, L(Param::delta_N));
  d.kappa = positive((L(Param::theta_N) * N0 + treg_kill0 * N0 - L(Param::sigma_N)) / (H0 * N0), "kappa");

  // 0 = sigma_C - theta_C C0 - gamma_C R0 C0 + eta_1 H0/(eta_2+H0) C0
  const double help0 = H0 / (L(Param::eta_2) + H0);
  d.eta_1 = positive((L(Param::theta_C) * C0 + L(Param::gamma_C) * R0 * C0 - L(Param::sigma_C)) / (help0 * C0),
                     "eta_1");

  // 0 = sigma_N - theta_N N1 - p T1 N1 - gamma_N R1^delta_N N1 + kappa H1 N1
  const double treg_kill1 = L(Param::gamma_N) * std::pow(R1, L(Param::delta_N));
  d.p = positive((L(Param::sigma_N) - L(Param::theta_N) * N1 - treg_kill1 * N1 + d.kappa * H1 * N1) / (T1 * N1), "p");

  // 0 = sigma_C - theta_C C1 - q T1 C1 - gamma_C R1 C1 + r N1 T1
  //     + j_C T1/(k_C+T1) C1 + eta_1 H1/(eta_2+H1) C1
  const double c_balance = L(Param::sigma_C) - L(Param::theta_C) * C1 - L(Param::q) * T1 * C1 -
                           L(Param::gamma_C) * R1 * C1 + L(Param::j_C) * T1 / (L(Param::k_C) + T1) * C1 +
                           d.eta_1 * H1 / (L(Param::eta_2) + H1) * C1;
  d.r = positive(-c_balance / (N1 * T1), "r");

  // 0 = sigma_R - theta_R R1 + c_1 H1 B_T1
  d.c_1 = positive((L(Param::theta_R) * R1 - d.sigma_R) / (H1 * BT1), "c_1");

  // 0 = sigma_H - theta_H H1 + j_H T1/(k_H+T1) B1 H1 - c_1 H1 B_T1
  d.j_H = positive((L(Param::theta_H) * H1 + d.c_1 * H1 * BT1 - d.sigma_H) / (T1 / (L(Param::k_H) + T1) * B1 * H1),
                   "j_H");

  // 0 = sigma_B - theta_B B1 - c_2 T1 B1
  d.c_2 = positive((d.sigma_B - L(Param::theta_B) * B1) / (T1 * B1), "c_2");

  // 0 = -theta_BT B_T1 + c_2 T1 B1
  d.theta_BT = positive(d.c_2 * T1 * B1 / BT1, "theta_BT");
  return d;
}

PartialParameters table_literature_parameters() {
  PartialParameters p;
  p.set(Param::a, 0.17)
      .set(Param::b, 1e-10)
      .set(Param::lambda_R, 1e-8)
      .set(Param::c, 15.0)
      .set(Param::delta, 1.0)
      .set(Param::s_N, 25.0)
      .set(Param::d, 1.7)
      .set(Param::l, 1.7)
      .set(Param::s_C, 3.5e-2)
      .set(Param::sigma_N, 1.13e8)
      .set(Param::theta_N, 0.06301)
      .set(Param::gamma_N, 1e-6)
      .set(Param::delta_N, 0.5)
      .set(Param::sigma_C, 3e7)
      .set(Param::theta_C, 0.009)
      .set(Param::q, 3.422e-10)
      .set(Param::gamma_C, 1e-6)
      .set(Param::j_C, 1.245e-1)
      .set(Param::k_C, 2.019e7)
      .set(Param::eta_2, 2.5036e3)
      .set(Param::theta_H, 0.00797)
      .set(Param::k_H, 2.5036e3)
      .set(Param::theta_R, 0.03851)
      .set(Param::theta_B, 0.0395)
      .set(Param::gamma_B, 20.0)
      .set(Param::theta_X, 0.033);
  return p;
}

ModelParameters table_parameters() {
  PartialParameters p = table_literature_parameters();
  p.set(Param::sigma_H, 2.2e7)
      .set(Param::sigma_R, 9.24e6)
      .set(Param::sigma_B, 3.16e7)
      .set(Param::kappa, 1.63e-11)
      .set(Param::p, 4.66e-12)
      .set(Param::eta_1, 2.48)
      .set(Param::r, 1.05e-10)
      .set(Param::c_1, 1.21e-10)
      .set(Param::j_H, 4.45e-12)
      .set(Param::c_2, 1.7e-13)
      .set(Param::theta_BT, 0.039);
  return ModelParameters(p);
}

ModelParameters baseline_parameters() {
  const PartialParameters lit = table_literature_parameters();
  return ModelParameters(derive_parameters(zero_tumor_state(), high_tumor_state(), lit).merged_into(lit));
}

}  // namespace bcim
