#include <doctest.h>

#include "properties.hpp"

using namespace bcim;

TEST_SUITE("properties") {

TEST_CASE("conversion conservation over 1000 random states") {
  const auto r = props::conversion_conservation(101, 1000);
  INFO(r.first_failure);
  CHECK(r.cases == 1000);
  CHECK(r.ok());
}

TEST_CASE("tumor-free invariance over 1000 random states") {
  const auto r = props::tumor_free_invariance(102, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("Hill ratio invariance over 1000 random scalings") {
  const auto r = props::hill_ratio_invariance(103, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("positivity over 1000 random runs") {
  const auto r = props::positivity(104, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("tolerance halving over 1000 random runs") {
  const auto r = props::tolerance_convergence(105, 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

}  // TEST_SUITE
