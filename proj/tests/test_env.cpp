#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pact/env.hpp"
#include "pact/numeric.hpp"
#include "pact/rng.hpp"
#include "test_support.hpp"

using namespace pact;
using testsup::bernoulli_agent;
using testsup::smooth_agent;

TEST_CASE("outcome grid validation") {
  OutcomeGrid ok{{0.0, 0.5, 1.0}};
  CHECK_NOTHROW(ok.validate());
  OutcomeGrid nonzero{{0.1, 0.5}};
  OutcomeGrid single{{0.0}};
  OutcomeGrid flat{{0.0, 0.5, 0.5}};
  OutcomeGrid high{{0.0, 1.5}};
  CHECK_THROWS_AS(nonzero.validate(), std::invalid_argument);
  CHECK_THROWS_AS(single.validate(), std::invalid_argument);
  CHECK_THROWS_AS(flat.validate(), std::invalid_argument);
  CHECK_THROWS_AS(high.validate(), std::invalid_argument);
}

TEST_CASE("pmf validity across families") {
  Rng rng(7);
  auto check_type = [&](const AgentType& t) {
    for (int i = 0; i <= 200; ++i) {
      double a = t.effort_cap() * i / 200.0;
      auto f = t.pmf(a);
      double sum = 0.0;
      for (double v : f) {
        CHECK(v >= -1e-12);
        CHECK(v <= 1.0 + 1e-12);
        sum += v;
      }
      CHECK(std::fabs(sum - 1.0) <= 1e-12);
      for (std::size_t j = 0; j + 1 < t.level_count(); ++j)
        CHECK(t.ccdf(j + 1, a) <= t.ccdf(j, a) + 1e-12);
    }
  };
  check_type(bernoulli_agent());
  check_type(smooth_agent());

  ProductionTechnology tab;
  tab.family = ProductionTechnology::Family::tabulated;
  tab.knots = {0.0, 0.25, 0.5, 0.75, 1.0};
  tab.ccdf_table = {{0.0, 0.3, 0.55, 0.8, 1.0}, {0.0, 0.1, 0.25, 0.5, 0.8}};
  AgentType t(OutcomeGrid{{0.0, 0.4, 1.0}}, tab,
              CostFunction::quadratic_cost(2.0), 1.0, 10.0);
  check_type(t);
}

TEST_CASE("ccdf nondecreasing in effort") {
  auto t = smooth_agent();
  for (std::size_t j = 1; j < t.level_count(); ++j)
    for (int i = 0; i < 200; ++i) {
      double a = i / 200.0, b = (i + 1) / 200.0;
      CHECK(t.ccdf(j, a) <= t.ccdf(j, b) + 1e-12);
    }
}

TEST_CASE("telescoped agent utility equals the direct pmf sum") {
  Rng rng(11);
  auto types = {bernoulli_agent(), smooth_agent()};
  for (const auto& t : types) {
    for (int trial = 0; trial < 50; ++trial) {
      Contract s;
      double run = 0.0;
      for (std::size_t j = 0; j < t.level_count(); ++j) {
        run += rng.uniform(0.0, 0.4);
        s.payments.push_back(run);
      }
      double a = rng.uniform(0.0, t.effort_cap());
      auto f = t.pmf(a);
      double direct = -t.cost(a);
      for (std::size_t j = 0; j < f.size(); ++j)
        direct += s.payments[j] * f[j];
      CHECK(agent_utility(t, s, a) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("linear best response hits the first-order condition") {
  auto t = bernoulli_agent();  // c(a) = a^2, r(a) = a
  CHECK(best_response_linear(t, {0.6}) == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(best_response_linear(t, {0.0}) == doctest::Approx(0.0));
  CHECK(best_response_linear(t, {3.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(best_response_linear(t, {-0.2}), std::invalid_argument);

  // Interior root for the three-outcome smooth instance, checked against a
  // dense scan of the utility itself.
  auto s = smooth_agent();
  double a_star = best_response_linear(s, {0.8});
  double best = -1e9, best_a = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    double a = i / 100000.0;
    double u = agent_utility(s, LinearContract{0.8}, a);
    if (u > best) {
      best = u;
      best_a = a;
    }
  }
  CHECK(a_star == doctest::Approx(best_a).epsilon(1e-4));
}

TEST_CASE("certified best response agrees with the grid fallback") {
  Rng rng(3);
  auto t = smooth_agent();
  for (int trial = 0; trial < 20; ++trial) {
    Contract s;
    double run = 0.0;
    for (std::size_t j = 0; j < t.level_count(); ++j) {
      run += rng.uniform(0.0, 0.5);
      s.payments.push_back(std::min(run, 1.0));
    }
    double certified = best_response(t, s, BestResponseMode::certified);
    double gridded = best_response(t, s, BestResponseMode::grid);
    CHECK(std::fabs(agent_utility(t, s, certified) -
                    agent_utility(t, s, gridded)) <= 1e-9);
  }
}

TEST_CASE("certified path rejects non-monotone contracts") {
  auto t = bernoulli_agent();
  Contract bad{{0.5, 0.2}};
  CHECK_THROWS_AS(best_response(t, bad, BestResponseMode::certified),
                  std::invalid_argument);
  // automatic falls back to the dense scan and still returns an argmax.
  double a = best_response(t, bad);
  double u = agent_utility(t, bad, a);
  for (int i = 0; i <= 500; ++i)
    CHECK(u >= agent_utility(t, bad, i / 500.0) - 1e-6);
}

TEST_CASE("linear contract wrapper matches the vector form") {
  auto t = smooth_agent();
  Contract s = Contract::linear(t.outcomes(), 0.7);
  for (int i = 0; i <= 20; ++i) {
    double a = i / 20.0;
    CHECK(agent_utility(t, s, a) ==
          doctest::Approx(agent_utility(t, LinearContract{0.7}, a))
              .epsilon(1e-12));
    CHECK(principal_utility(t, s, a) ==
          doctest::Approx(principal_utility(t, LinearContract{0.7}, a))
              .epsilon(1e-12));
  }
}

TEST_CASE("effort domain errors") {
  auto t = bernoulli_agent();
  Contract s = Contract::linear(t.outcomes(), 0.5);
  CHECK_THROWS_AS(agent_utility(t, s, -0.1), std::domain_error);
  CHECK_THROWS_AS(agent_utility(t, s, 1.1), std::domain_error);
  Rng rng(1);
  CHECK_THROWS_AS(sample_outcome(t, 2.0, rng), std::domain_error);
}

TEST_CASE("outcome sampling is seed-stable and matches the pmf") {
  auto t = smooth_agent();
  double a = 0.6;
  Rng r1(42), r2(42);
  for (int i = 0; i < 1000; ++i)
    CHECK(sample_outcome(t, a, r1) == sample_outcome(t, a, r2));

  auto f = t.pmf(a);
  const int n = 200000;
  std::vector<int> counts(t.level_count(), 0);
  Rng rng(9);
  for (int i = 0; i < n; ++i) counts[sample_outcome(t, a, rng)] += 1;
  for (std::size_t j = 0; j < f.size(); ++j) {
    double sigma = std::sqrt(f[j] * (1.0 - f[j]) / n);
    CHECK(std::fabs(counts[j] / double(n) - f[j]) <= 4.0 * sigma + 1e-9);
  }
}

TEST_CASE("assumption report closed forms") {
  auto rep = validate_assumptions(bernoulli_agent());
  CHECK(rep.outcome_grad_bound == doctest::Approx(1.0));
  CHECK(rep.outcome_curvature_max == doctest::Approx(0.0));
  CHECK(rep.cost_curvature_min == doctest::Approx(2.0));
  CHECK(rep.sdfc_holds);
  CHECK(rep.principal_utility_lipschitz == doctest::Approx(4.0));
  CHECK(rep.agent_response_lipschitz == doctest::Approx(1.0));

  auto rep2 = validate_assumptions(smooth_agent());
  CHECK(rep2.outcome_grad_bound == doctest::Approx(2.0));
  CHECK(rep2.outcome_curvature_max == doctest::Approx(-0.75));
  CHECK(rep2.sdfc_holds);
}

TEST_CASE("flat cost fails the curvature validation") {
  OutcomeGrid grid{{0.0, 1.0}};
  ProductionTechnology tech;
  tech.family = ProductionTechnology::Family::bernoulli_effort;
  AgentType t(grid, tech, CostFunction::power_cost(0.5, 1.0), 1.0, 10.0);
  auto rep = validate_assumptions(t);
  CHECK(rep.cost_curvature_min == doctest::Approx(0.0));
  CHECK_FALSE(rep.sdfc_holds);
  CHECK(std::isinf(rep.principal_utility_lipschitz));
}

TEST_CASE("coarse tabulated grids are rejected as inconclusive") {
  ProductionTechnology tab;
  tab.family = ProductionTechnology::Family::tabulated;
  tab.knots = {0.0, 0.5, 1.0};
  tab.ccdf_table = {{0.0, 0.6, 1.0}};
  AgentType t(OutcomeGrid{{0.0, 1.0}}, tab, CostFunction::quadratic_cost(2.0),
              1.0, 10.0);
  CHECK_THROWS_AS(validate_assumptions(t), std::runtime_error);
}

TEST_CASE("tabulated technology tracks the analytic family it samples") {
  // Tabulate G(a) = a on a dense grid; responses should match the bernoulli
  // closed form.
  ProductionTechnology tab;
  tab.family = ProductionTechnology::Family::tabulated;
  for (int i = 0; i <= 20; ++i) {
    tab.knots.push_back(i / 20.0);
  }
  tab.ccdf_table.push_back(tab.knots);
  AgentType t(OutcomeGrid{{0.0, 1.0}}, tab, CostFunction::quadratic_cost(2.0),
              1.0, 2.0);
  CHECK(t.ccdf(1, 0.37) == doctest::Approx(0.37).epsilon(1e-9));
  CHECK(best_response_linear(t, {0.6}) == doctest::Approx(0.3).epsilon(1e-6));
  auto rep = validate_assumptions(t);
  CHECK(rep.outcome_grad_bound == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("beta_max must reach the full response range") {
  OutcomeGrid grid{{0.0, 1.0}};
  ProductionTechnology tech;
  tech.family = ProductionTechnology::Family::bernoulli_effort;
  CHECK_THROWS_AS(
      AgentType(grid, tech, CostFunction::quadratic_cost(2.0), 1.0, 1.0),
      std::invalid_argument);
}

TEST_CASE("contract validators") {
  Contract good{{0.0, 0.3, 0.8}};
  CHECK(good.is_monotone());
  CHECK(good.is_bounded());
  CHECK_NOTHROW(good.validate_monotone_bounded());
  Contract neg{{-0.1, 0.3}};
  CHECK_FALSE(neg.is_monotone());
  Contract big{{0.0, 1.4}};
  CHECK_FALSE(big.is_bounded());
  CHECK_THROWS_AS(big.validate_monotone_bounded(), std::invalid_argument);
}

TEST_CASE("monotone cubic interpolation basics") {
  std::vector<double> x{0.0, 0.3, 0.6, 1.0};
  std::vector<double> y{0.0, 0.2, 0.7, 1.0};
  MonotoneCubic mc(x, y);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(mc.value(x[i]) == doctest::Approx(y[i]).epsilon(1e-12));
  for (int i = 0; i < 100; ++i) {
    double a = i / 100.0, b = (i + 1) / 100.0;
    CHECK(mc.value(a) <= mc.value(b) + 1e-12);  // monotone preserved
    double fd = (mc.value(a + 1e-6) - mc.value(a - 1e-6 < 0 ? 0 : a - 1e-6)) /
                (a < 1e-6 ? 1e-6 : 2e-6);
    CHECK(mc.deriv(a) == doctest::Approx(fd).epsilon(1e-3).scale(1.0));
  }
}

TEST_CASE("expected reward and its derivative") {
  auto t = bernoulli_agent();
  CHECK(t.expected_reward(0.42) == doctest::Approx(0.42).epsilon(1e-12));
  auto s = smooth_agent();
  for (int i = 1; i < 10; ++i) {
    double a = i / 10.0;
    auto f = s.pmf(a);
    double direct = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
      direct += s.outcomes().levels[j] * f[j];
    CHECK(s.expected_reward(a) == doctest::Approx(direct).epsilon(1e-12));
    double fd = (s.expected_reward(a + 1e-6) - s.expected_reward(a - 1e-6)) / 2e-6;
    CHECK(s.reward_prime(a) == doctest::Approx(fd).epsilon(1e-5));
  }
}
