#include <doctest.h>

#include <stdexcept>

#include "bcim/dosing.hpp"
#include "bcim/text.hpp"

using namespace bcim;

TEST_SUITE("dosing") {

TEST_CASE("unit conversions") {
  CHECK(dose_to_concentration(375, 1.7, 5) == doctest::Approx(127.5).epsilon(1e-14));
  CHECK(dose_to_concentration(1000, 1.7, 5) == doctest::Approx(340).epsilon(1e-14));
  CHECK(dose_to_concentration(42, 3.3, 3.3) == doctest::Approx(42));
  CHECK_THROWS_AS(dose_to_concentration(0, 1.7, 5), std::domain_error);
  CHECK_THROWS_AS(dose_to_concentration(375, -1, 5), std::domain_error);

  CHECK(infusion_rate(127.5, 4.0 / 24.0) == doctest::Approx(765).epsilon(1e-14));
  CHECK(infusion_rate(340, 4.0 / 24.0) == doctest::Approx(2040).epsilon(1e-14));
  CHECK(infusion_rate(9.5, 1.0) == 9.5);
  CHECK_THROWS_AS(infusion_rate(127.5, 0.0), std::domain_error);
}

TEST_CASE("v(t) on the standard schedule") {
  const DoseSchedule s = preset_schedule(1);
  CHECK(v_of_t(s, 7.05) == doctest::Approx(765));
  CHECK(v_of_t(s, 3.0) == 0.0);
  CHECK(v_of_t(s, 0.0) == doctest::Approx(765));          // start inclusive
  CHECK(v_of_t(s, 7.0 + 1.0 / 6.0) == 0.0);               // end exclusive
  CHECK(v_of_t(DoseSchedule{}, 1.0) == 0.0);
}

TEST_CASE("preset regimens") {
  struct Expect {
    int id;
    std::size_t n;
    double every;
    double rate;
  };
  for (auto e : {Expect{1, 4, 7, 765}, Expect{2, 2, 7, 2040}, Expect{3, 8, 7, 765}, Expect{4, 4, 5, 250},
                 Expect{5, 8, 7, 2040}}) {
    CAPTURE(e.id);
    const DoseSchedule s = preset_schedule(e.id, 2.0);
    REQUIRE(s.windows().size() == e.n);
    for (std::size_t i = 0; i < e.n; ++i) {
      const auto& w = s.windows()[i];
      CHECK(w.start == doctest::Approx(2.0 + e.every * i));
      CHECK(w.duration == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
      CHECK(w.rate == doctest::Approx(e.rate).epsilon(1e-4));
    }
  }
  // Per-dose delivery equals the converted dose exactly.
  const DoseSchedule one = preset_schedule(1), four = preset_schedule(4);
  for (const auto& w : one.windows()) CHECK(w.delivered() == doctest::Approx(127.5).epsilon(1e-14));
  for (const auto& w : four.windows()) {
    CHECK(w.delivered() == doctest::Approx(122.549 * 1.7 / 5).epsilon(1e-14));
  }
  CHECK_THROWS_AS(preset_schedule(0), std::invalid_argument);
  CHECK_THROWS_AS(preset_schedule(6), std::invalid_argument);
}

TEST_CASE("quadrature of v matches the delivered total") {
  for (int id = 1; id <= 5; ++id) {
    const DoseSchedule s = preset_schedule(id);
    const double horizon = 60.0;
    // Midpoint rule on a grid that puts every window edge on a node.
    const int per_day = 6 * 40;
    double sum = 0.0;
    for (int i = 0; i < horizon * per_day; ++i) sum += v_of_t(s, (i + 0.5) / per_day) / per_day;
    double expected = 0.0;
    for (const auto& w : s.windows()) expected += w.delivered();
    CHECK(sum == doctest::Approx(expected).epsilon(1e-9));
    CHECK(s.delivered_between(0.0, horizon) == doctest::Approx(expected).epsilon(1e-12));
  }
  const DoseSchedule s = preset_schedule(1);
  CHECK(s.delivered_between(0.0, 1.0 / 12.0) == doctest::Approx(765.0 / 12.0));
}

TEST_CASE("schedule validation and breakpoints") {
  CHECK_THROWS_AS(DoseSchedule({{0, 1, 1}, {0.5, 1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(DoseSchedule({{-1, 1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(DoseSchedule({{0, 0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(DoseSchedule({{0, 1, -1}}), std::invalid_argument);
  CHECK_NOTHROW(DoseSchedule({{1, 1, 1}, {2, 1, 1}}));  // touching windows are fine

  const DoseSchedule s({{7, 1, 3}, {0, 1, 2}});
  CHECK(s.windows().front().start == 0.0);
  CHECK(s.breakpoints(0.0, 10.0) == std::vector<double>{1.0, 7.0, 8.0});
  CHECK(s.breakpoints(0.5, 7.5) == std::vector<double>{1.0, 7.0});
}

TEST_CASE("schedule files") {
  const DoseSchedule s = parse_schedule_text(
      "# two doses\nbsa = 2\nblood_volume_L = 4\ninfusion_hours = 2\nstart_days,dose_mg_per_m2\n0,100\n3.5,200\n");
  REQUIRE(s.windows().size() == 2);
  CHECK(s.windows()[0].duration == doctest::Approx(2.0 / 24.0));
  CHECK(s.windows()[0].delivered() == doctest::Approx(50.0));
  CHECK(s.windows()[1].start == 3.5);
  CHECK(s.windows()[1].delivered() == doctest::Approx(100.0));

  const DoseSchedule defaults = parse_schedule_text("0,375\n7,375\n14,375\n21,375\n");
  CHECK(defaults == preset_schedule(1));

  CHECK_THROWS_AS(parse_schedule_text("0,375\nbad line\n"), ParseError);
  CHECK_THROWS_WITH(parse_schedule_text("0,375\n0,375\n"), doctest::Contains("overlap"));
  CHECK_THROWS_AS(parse_schedule_text("colour = red\n"), ParseError);
}

}  // TEST_SUITE
