#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pact/lp.hpp"
#include "pact/rng.hpp"
#include "test_support.hpp"

using namespace pact;

TEST_CASE("box maximum") {
  LinearProgram lp(2, LinearProgram::Sense::maximize);
  lp.objective = {1.0, 1.0};
  lp.lower = {0.0, 0.0};
  lp.upper = {std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity()};
  lp.add_constraint({1.0, 0.0}, LinearProgram::Relation::less_equal, 1.0);
  lp.add_constraint({0.0, 1.0}, LinearProgram::Relation::less_equal, 1.0);
  auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.x[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.max_violation <= 1e-9);
}

TEST_CASE("zero objective returns a feasible point with value zero") {
  LinearProgram lp(2, LinearProgram::Sense::maximize);
  lp.lower = {0.0, 0.0};
  lp.upper = {1.0, 1.0};
  lp.add_constraint({1.0, 1.0}, LinearProgram::Relation::greater_equal, 0.5);
  auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == 0.0);
  CHECK(sol.x[0] + sol.x[1] >= 0.5 - 1e-9);
}

TEST_CASE("infeasible detection") {
  LinearProgram lp(1, LinearProgram::Sense::maximize);
  lp.objective = {1.0};
  lp.lower = {0.0};
  lp.upper = {std::numeric_limits<double>::infinity()};
  lp.add_constraint({1.0}, LinearProgram::Relation::greater_equal, 2.0);
  lp.add_constraint({1.0}, LinearProgram::Relation::less_equal, 1.0);
  CHECK(solve_lp(lp).status == LpStatus::infeasible);
}

TEST_CASE("unbounded detection") {
  LinearProgram lp(1, LinearProgram::Sense::maximize);
  lp.objective = {1.0};
  lp.lower = {0.0};
  lp.upper = {std::numeric_limits<double>::infinity()};
  CHECK(solve_lp(lp).status == LpStatus::unbounded);
}

TEST_CASE("equality rows") {
  LinearProgram lp(2, LinearProgram::Sense::maximize);
  lp.objective = {1.0, 0.0};
  lp.lower = {0.0, 0.0};
  lp.upper = {std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity()};
  lp.add_constraint({1.0, 1.0}, LinearProgram::Relation::equal, 1.0);
  auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.x[0] + sol.x[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("free and shifted variables") {
  LinearProgram lp(1, LinearProgram::Sense::minimize);
  lp.objective = {1.0};
  // free variable, bounded below only through a row
  lp.add_constraint({1.0}, LinearProgram::Relation::greater_equal, -5.0);
  auto sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == doctest::Approx(-5.0).epsilon(1e-9));

  LinearProgram lp2(1, LinearProgram::Sense::maximize);
  lp2.objective = {1.0};
  lp2.lower = {-2.0};
  lp2.upper = {3.0};
  auto sol2 = solve_lp(lp2);
  REQUIRE(sol2.status == LpStatus::optimal);
  CHECK(sol2.value == doctest::Approx(3.0).epsilon(1e-9));
  lp2.sense = LinearProgram::Sense::minimize;
  CHECK(solve_lp(lp2).value == doctest::Approx(-2.0).epsilon(1e-9));

  LinearProgram lp3(1, LinearProgram::Sense::minimize);
  lp3.objective = {1.0};
  lp3.upper = {1.5};  // lower stays -inf
  lp3.add_constraint({-1.0}, LinearProgram::Relation::less_equal, 4.0);
  auto sol3 = solve_lp(lp3);
  REQUIRE(sol3.status == LpStatus::optimal);
  CHECK(sol3.value == doctest::Approx(-4.0).epsilon(1e-9));
}

TEST_CASE("contradictory bounds are infeasible") {
  LinearProgram lp(1, LinearProgram::Sense::maximize);
  lp.objective = {1.0};
  lp.lower = {2.0};
  lp.upper = {1.0};
  CHECK(solve_lp(lp).status == LpStatus::infeasible);
}

TEST_CASE("random programs match vertex enumeration") {
  Rng rng(20240817);
  int checked = 0, infeasible = 0;
  for (int trial = 0; trial < 80; ++trial) {
    auto lp = testsup::random_lp(rng);
    auto oracle = testsup::enumerate_lp_value(lp);
    auto sol = solve_lp(lp);
    if (!oracle) {
      CHECK(sol.status == LpStatus::infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(std::fabs(sol.value - *oracle) <= 1e-7 * (1.0 + std::fabs(*oracle)));
    CHECK(sol.max_violation <= 1e-7);
    ++checked;
  }
  CHECK(checked >= 30);      // generator should produce plenty of solvable LPs
  CHECK(infeasible >= 3);    // and some infeasible ones
}

TEST_CASE("identical inputs give identical pivots and output") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto lp = testsup::random_lp(rng);
    auto a = solve_lp(lp);
    auto b = solve_lp(lp);
    CHECK(a.status == b.status);
    CHECK(a.iterations == b.iterations);
    REQUIRE(a.x.size() == b.x.size());
    for (std::size_t i = 0; i < a.x.size(); ++i) CHECK(a.x[i] == b.x[i]);
    if (a.status == LpStatus::optimal) CHECK(a.value == b.value);
  }
}

TEST_CASE("dimension mismatches throw") {
  LinearProgram lp(2, LinearProgram::Sense::maximize);
  lp.add_constraint({1.0}, LinearProgram::Relation::less_equal, 1.0);
  CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
}
