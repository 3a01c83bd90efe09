#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "bcim/analysis.hpp"
#include "bcim/homeostasis.hpp"
#include "bcim/model.hpp"
#include "support.hpp"

using namespace bcim;
using bcim::test::rel_close;

TEST_SUITE("model") {

TEST_CASE("nk lysis fraction") {
  const ModelParameters p = table_parameters();
  CHECK(nk_lysis_fraction(1e6, 0.0, 0.0, p) == 0.0);
  CHECK(nk_lysis_fraction(0.0, 0.0, 0.0, p) == 0.0);
  // c * 1 / (s_N + 1) with e^{-lambda_R * 0} = 1
  CHECK(nk_lysis_fraction(1e6, 1e6, 0.0, p) == doctest::Approx(15.0 / 26.0).epsilon(1e-12));
  CHECK(nk_lysis_fraction(1e6, 1e6, 0.0, p) == doctest::Approx(0.5769).epsilon(1e-4));
  // Treg inhibition
  CHECK(nk_lysis_fraction(1e6, 1e6, 1e8, p) == doctest::Approx(15.0 / 26.0 * std::exp(-1.0)).epsilon(1e-12));
  // ratio dependence
  for (double s : {1e-3, 0.5, 7.0, 1e4}) {
    CHECK(nk_lysis_fraction(2e6 * s, 3e5 * s, 1e7, p) ==
          doctest::Approx(nk_lysis_fraction(2e6, 3e5, 1e7, p)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(nk_lysis_fraction(-1.0, 1.0, 0.0, p), std::domain_error);
  CHECK_THROWS_AS(nk_lysis_fraction(1.0, -1.0, 0.0, p), std::domain_error);
  CHECK_THROWS_AS(nk_lysis_fraction(1.0, 1.0, -1.0, p), std::domain_error);
}

TEST_CASE("cd8 lysis fraction") {
  const ModelParameters p = table_parameters();
  CHECK(cd8_lysis_fraction(1e6, 0.0, p) == 0.0);
  CHECK(cd8_lysis_fraction(1e6, 1e6, p) == doctest::Approx(1.7 / 1.035).epsilon(1e-12));
  CHECK(cd8_lysis_fraction(1e6, 1e6, p) == doctest::Approx(1.6425).epsilon(1e-4));
  CHECK(cd8_lysis_fraction(0.0, 5.0, p) == doctest::Approx(1.7));
  for (double s : {1e-2, 3.0, 1e5}) {
    CHECK(cd8_lysis_fraction(4e7 * s, 2e5 * s, p) == doctest::Approx(cd8_lysis_fraction(4e7, 2e5, p)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cd8_lysis_fraction(1.0, -2.0, p), std::domain_error);
}

TEST_CASE("rhs matches an independent transcription") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const ModelParameters p = test::jittered_parameters(rng);
    const StateVector y = test::random_state(rng);
    const double v = (i % 3 == 0) ? 765.0 : 0.0;
    const auto got = rhs(ModelState::from_array(y), p, v).to_array();
    const auto want = test::reference_rhs(y, p, v);
    for (std::size_t k = 0; k < kStateSize; ++k) {
      // Terms can cancel, so compare against the magnitude of the largest term.
      const double scale = std::abs(want[k]) + 1e-6 * (std::abs(y[k]) + 1.0) + 1.0;
      CHECK(std::abs(got[k] - want[k]) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("rhs at equilibria") {
  const ModelParameters p = baseline_parameters();
  const ModelState e = zero_tumor_equilibrium(p);
  const auto d = rhs(e, p, 0.0).to_array();
  const auto y = e.to_array();
  for (std::size_t k = 0; k < kStateSize; ++k) CHECK(std::abs(d[k]) <= 1e-9 * std::max(1.0, y[k]));

  const ModelState tumor_free{0.0, 3e9, 1e5, 2e9, 2e8, 7e8, 0.0, 0.0};
  const ModelState dt = rhs(tumor_free, p, 0.0);
  CHECK(dt.T == 0.0);
  CHECK(dt.B_T == 0.0);

  // High-tumor state: immune components near stationary, tumor declining.
  const ModelState e1 = high_tumor_state().to_model_state();
  const auto d1 = rhs(e1, p, 0.0).to_array();
  const auto y1 = e1.to_array();
  CHECK(d1[0] < 0.0);
  for (std::size_t k = 1; k < kCellComponents; ++k) CHECK(std::abs(d1[k]) <= 1e-6 * y1[k]);
}

TEST_CASE("rhs rejects states outside the domain") {
  const ModelParameters p = baseline_parameters();
  CHECK_THROWS_AS(rhs(ModelState{1.0, -5.0, 0, 0, 0, 0, 0, 0}, p, 0.0), std::domain_error);
  CHECK_THROWS(rhs(ModelState{1.0, 1.0, 0, 0, 0, 0, 0, 0}, p, -1.0));
}

TEST_CASE("conversion terms cancel exactly") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const ModelParameters p = test::jittered_parameters(rng);
    const ModelState s = ModelState::from_array(test::random_state(rng));
    const ModelState with = rhs(s, p, 0.0);
    const ModelState no_c1 = rhs(s, p.with(Param::c_1, 0.0), 0.0);
    const ModelState no_c2 = rhs(s, p.with(Param::c_2, 0.0), 0.0);
    // The conversion term enters H and R with opposite signs, so the sums
    // agree up to rounding.
    CHECK(props::cancels(with.H, with.R, no_c1.H, no_c1.R));
    CHECK(props::cancels(with.B, with.B_T, no_c2.B, no_c2.B_T));
  }
}

TEST_CASE("analytic jacobian against finite differences") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const ModelParameters p = test::jittered_parameters(rng);
    StateVector y = test::random_state(rng);
    for (auto& v : y) v = std::max(v, 1.0);  // keep central differences inside the domain
    const JacobianMatrix J = rhs_jacobian(y, p);
    for (std::size_t j = 0; j < kStateSize; ++j) {
      const double h = 1e-6 * y[j];
      StateVector yp = y, ym = y;
      yp[j] += h;
      ym[j] -= h;
      const auto fp = test::reference_rhs(yp, p, 0.0), fm = test::reference_rhs(ym, p, 0.0);
      for (std::size_t k = 0; k < kStateSize; ++k) {
        const double fd = (fp[k] - fm[k]) / (2 * h);
        // Difference noise is relative to the size of f, not of the entry.
        const double f0 = std::abs(test::reference_rhs(y, p, 0.0)[k]) + std::abs(fp[k]) + 1.0;
        CHECK(std::abs(J[k][j] - fd) <= 1e-4 * std::abs(fd) + 1e-7 * f0 / h);
      }
    }
  }
}

TEST_CASE("parameters") {
  const ModelParameters p = table_parameters();
  CHECK(p[Param::a] == 0.17);
  CHECK(p.with(Param::a, 0.2)[Param::a] == 0.2);
  CHECK(p[Param::a] == 0.17);  // copies, not mutation
  auto values = p.values();
  values[static_cast<std::size_t>(Param::theta_N)] = -1.0;
  CHECK_THROWS_AS(ModelParameters{values}, std::invalid_argument);
  values = p.values();
  values[static_cast<std::size_t>(Param::delta)] = 0.0;
  CHECK_THROWS_AS(ModelParameters{values}, std::invalid_argument);
  values = p.values();
  values[static_cast<std::size_t>(Param::q)] = std::nan("");
  CHECK_THROWS_AS(ModelParameters{values}, std::invalid_argument);

  PartialParameters partial;
  partial.set(Param::a, 1.0);
  CHECK_THROWS_WITH_AS(ModelParameters{partial}, doctest::Contains("lambda_R"), std::invalid_argument);

  for (Param q : all_params()) CHECK(param_from_name(param_name(q)) == q);
  CHECK_FALSE(param_from_name("alpha").has_value());
  for (std::size_t i = 0; i < kStateSize; ++i) CHECK(component_from_name(kComponentNames[i]).has_value());
}

TEST_CASE("trophic forms") {
  using K = TrophicForm::Kind;
  CHECK_THROWS_AS(TrophicForm(K::power, {1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(TrophicForm(K::rational_hill, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(TrophicForm(K::michaelis_menten, {1.0}), std::invalid_argument);

  const TrophicForm pw(K::power, {2.0, 0.5});
  CHECK(pw.rate(123.0, 16.0) == doctest::Approx(8.0));
  const TrophicForm rh(K::rational_hill, {10.0, 1.0, 4.0});
  CHECK(rh.rate(100.0, 100.0) == doctest::Approx(2.0));  // 10 / (1 + 4)
  CHECK(rh.rate(3.0, 5.0) == doctest::Approx(rh.rate(300.0, 500.0)));
  CHECK(rh.rate(100.0, 0.0) == 0.0);
  const TrophicForm mm(K::michaelis_menten, {6.0, 2.0});
  CHECK(mm.rate(1.0, 2.0) == doctest::Approx(3.0));

  CHECK(TrophicForm::coefficient_names(K::rational_hill, false) == std::vector<std::string>{"c", "delta", "s_N"});
  CHECK(TrophicForm::coefficient_names(K::rational_hill, true) ==
        std::vector<std::string>{"gamma_N", "delta_N", "s_R"});
  for (K k : {K::power, K::rational_hill, K::michaelis_menten}) {
    CHECK(TrophicForm::kind_from_name(TrophicForm::kind_name(k)) == k);
  }
}

TEST_CASE("domain clamp") {
  const std::array<double, kStateSize> scale = {1e9, 1e9, 1e9, 1e9, 1e9, 1e9, 1e9, 1.0};
  StateVector y = {1.0, -0.5, 2.0, 0, 0, 0, 0, -1e-10};
  CHECK(clamp_to_domain(y, scale));
  CHECK(y[1] == 0.0);
  CHECK(y[7] == 0.0);
  StateVector bad = {1.0, -5.0, 2.0, 0, 0, 0, 0, 0};
  const StateVector before = bad;
  CHECK_FALSE(clamp_to_domain(bad, scale));
  CHECK(bad == before);
}

}  // TEST_SUITE
