#pragma once

// Single-step kernels for fixed-size autonomous systems y' = f(y).
// The right-hand side callable has signature bool(const Vec&, Vec&) and
// returns false when it cannot evaluate at the given point; a step that
// hits such a point reports failure so the caller can shrink h.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>

namespace bcim::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

/// RMS of e_i / (atol_i + rtol * max(|a_i|, |b_i|)).
template <std::size_t N>
double error_norm(const Vec<N>& err, const Vec<N>& a, const Vec<N>& b, double rtol, const Vec<N>& atol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = atol[i] + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
    const double q = err[i] / sc;
    sum += q * q;
  }
  return std::sqrt(sum / static_cast<double>(N));
}

namespace dp5 {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace dp5

/// One Dormand-Prince 5(4) step with FSAL stage and continuous extension.
template <std::size_t N>
struct DormandPrinceStep {
  Vec<N> y1{};    // fifth-order solution
  Vec<N> err{};   // embedded error estimate
  Vec<N> k7{};    // f(y1), first stage of the next step
  Vec<N> y6{};    // sixth stage point, for stiffness detection
  Vec<N> k6{};
  std::array<Vec<N>, 5> dense{};

  /// Returns false if any stage evaluation failed.
  template <class F>
  bool compute(F&& f, const Vec<N>& y, const Vec<N>& k1, double h) {
    using namespace dp5;
    Vec<N> k2, k3, k4, k5, tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    if (!f(tmp, k2)) return false;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    if (!f(tmp, k3)) return false;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    if (!f(tmp, k4)) return false;
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    if (!f(tmp, k5)) return false;
    for (std::size_t i = 0; i < N; ++i) {
      y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    if (!f(y6, k6)) return false;
    for (std::size_t i = 0; i < N; ++i) {
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    if (!f(y1, k7)) return false;
    for (std::size_t i = 0; i < N; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double ydiff = y1[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      dense[0][i] = y[i];
      dense[1][i] = ydiff;
      dense[2][i] = bspl;
      dense[3][i] = ydiff - h * k7[i] - bspl;
      dense[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    return true;
  }

  /// Continuous extension at fraction theta in [0, 1] of the step.
  [[nodiscard]] Vec<N> interpolate(double theta) const {
    const double th1 = 1.0 - theta;
    Vec<N> out;
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = dense[0][i] +
               theta * (dense[1][i] + th1 * (dense[2][i] + theta * (dense[3][i] + th1 * dense[4][i])));
    }
    return out;
  }

  /// h times the local Lipschitz estimate |k7 - k6| / |y1 - y6|.
  [[nodiscard]] double stiffness_ratio(double h) const {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      num += (k7[i] - k6[i]) * (k7[i] - k6[i]);
      den += (y1[i] - y6[i]) * (y1[i] - y6[i]);
    }
    return den > 0.0 ? std::abs(h) * std::sqrt(num / den) : 0.0;
  }
};

namespace ros4 {

// Shampine's coefficients for the Kaps-Rentrop four-stage scheme
// (order 4, embedded order 3).
inline constexpr double gam = 1.0 / 2;
inline constexpr double a21 = 2.0, a31 = 48.0 / 25, a32 = 6.0 / 25;
inline constexpr double c21 = -8.0, c31 = 372.0 / 25, c32 = 12.0 / 5;
inline constexpr double c41 = -112.0 / 125, c42 = -54.0 / 125, c43 = -2.0 / 5;
inline constexpr double b1 = 19.0 / 9, b2 = 1.0 / 2, b3 = 25.0 / 108, b4 = 125.0 / 108;
inline constexpr double e1 = 17.0 / 54, e2 = 7.0 / 36, e3 = 0.0, e4 = 125.0 / 108;

}  // namespace ros4

/// One Rosenbrock 4(3) step using an exact Jacobian J = df/dy at y.
template <std::size_t N>
struct RosenbrockStep {
  using Matrix = Eigen::Matrix<double, static_cast<int>(N), static_cast<int>(N)>;
  using Column = Eigen::Matrix<double, static_cast<int>(N), 1>;

  Vec<N> y1{};
  Vec<N> err{};

  template <class F>
  bool compute(F&& f, const Vec<N>& y, const Vec<N>& f0, const Matrix& jac, double h) {
    using namespace ros4;
    Matrix a = -jac;
    a.diagonal().array() += 1.0 / (gam * h);
    const Eigen::PartialPivLU<Matrix> lu(a);

    // Rows without off-diagonal coupling are solved as scalars. Pivoting
    // would otherwise leak rounding from other rows into them, and an
    // invariant such as y_i = 0 with f_i = 0 would drift.
    std::array<bool, N> scalar_row{};
    for (std::size_t i = 0; i < N; ++i) {
      scalar_row[i] = true;
      for (std::size_t j = 0; j < N && scalar_row[i]; ++j) scalar_row[i] = j == i || a(i, j) == 0.0;
    }
    auto solve = [&](const Column& rhs) {
      Column x = lu.solve(rhs);
      for (std::size_t i = 0; i < N; ++i) {
        if (scalar_row[i]) x[i] = rhs[i] / a(i, i);
      }
      return x;
    };

    auto map = [](const Vec<N>& v) { return Eigen::Map<const Column>(v.data()); };
    Column g1 = solve(map(f0));
    Vec<N> tmp, ft;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + a21 * g1[i];
    if (!f(tmp, ft)) return false;
    Column g2 = solve(map(ft) + c21 * g1 / h);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + a31 * g1[i] + a32 * g2[i];
    if (!f(tmp, ft)) return false;
    Column g3 = solve(map(ft) + (c31 * g1 + c32 * g2) / h);
    Column g4 = solve(map(ft) + (c41 * g1 + c42 * g2 + c43 * g3) / h);
    for (std::size_t i = 0; i < N; ++i) {
      y1[i] = y[i] + b1 * g1[i] + b2 * g2[i] + b3 * g3[i] + b4 * g4[i];
      err[i] = e1 * g1[i] + e2 * g2[i] + e3 * g3[i] + e4 * g4[i];
      if (!std::isfinite(y1[i]) || !std::isfinite(err[i])) return false;
    }
    return true;
  }
};

/// Cubic Hermite interpolant on one step from endpoint values and slopes.
template <std::size_t N>
Vec<N> hermite(const Vec<N>& y0, const Vec<N>& f0, const Vec<N>& y1, const Vec<N>& f1, double h, double theta) {
  const double t2 = theta * theta, t3 = t2 * theta;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  return out;
}

}  // namespace bcim::ode
