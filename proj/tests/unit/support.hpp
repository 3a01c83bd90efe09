#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "bcim/homeostasis.hpp"
#include "bcim/model.hpp"
#include "properties.hpp"

namespace bcim::test {

inline bool rel_close(double a, double b, double rel, double abs = 0.0) {
  return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

// Straight transcription of the eight model equations, written without
// reference to the library implementation.
inline StateVector reference_rhs(const StateVector& y, const ModelParameters& P, double v) {
  auto p = [&](Param q) { return P[q]; };
  const double T = y[0], N = y[1], C = y[2], H = y[3], R = y[4], B = y[5], BT = y[6], X = y[7];
  const double nk = N == 0.0 ? 0.0
                             : p(Param::c) * std::exp(-p(Param::lambda_R) * R) * std::pow(N, p(Param::delta)) /
                                   (p(Param::s_N) * std::pow(T, p(Param::delta)) + std::pow(N, p(Param::delta)));
  const double cd8 = C == 0.0 ? 0.0
                              : p(Param::d) * std::pow(C, p(Param::l)) /
                                    (p(Param::s_C) * std::pow(T, p(Param::l)) + std::pow(C, p(Param::l)));
  StateVector d{};
  d[0] = p(Param::a) * T * (1 - p(Param::b) * T) - nk * T - cd8 * T;
  d[1] = p(Param::sigma_N) - p(Param::theta_N) * N - p(Param::p) * T * N -
         p(Param::gamma_N) * std::pow(R, p(Param::delta_N)) * N + p(Param::kappa) * H * N;
  d[2] = p(Param::sigma_C) - p(Param::theta_C) * C - p(Param::q) * T * C - p(Param::gamma_C) * R * C +
         p(Param::r) * N * T + p(Param::j_C) * T / (p(Param::k_C) + T) * C +
         p(Param::eta_1) * H / (p(Param::eta_2) + H) * C;
  d[3] = p(Param::sigma_H) - p(Param::theta_H) * H + p(Param::j_H) * T / (p(Param::k_H) + T) * B * H -
         p(Param::c_1) * H * BT;
  d[4] = p(Param::sigma_R) - p(Param::theta_R) * R + p(Param::c_1) * H * BT;
  d[5] = p(Param::sigma_B) - p(Param::theta_B) * B - p(Param::c_2) * T * B - p(Param::gamma_B) * X * X * B;
  d[6] = -p(Param::theta_BT) * BT + p(Param::c_2) * T * B;
  d[7] = -p(Param::theta_X) * X + v;
  return d;
}

// Every value scaled by an independent log-uniform factor in [1/spread, spread].
inline ModelParameters jittered_parameters(std::mt19937_64& rng, double spread = 1.5) {
  return props::random_parameters(rng, spread);
}

using props::random_state;

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bcim-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace bcim::test
