#include "pact/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pact {

namespace {

constexpr double kEffortTol = 1e-12;
constexpr int kSweepPoints = 2001;  // finite-difference sweep resolution

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void OutcomeGrid::validate() const {
  require(levels.size() >= 2, "OutcomeGrid: need at least two outcome levels");
  require(levels.front() == 0.0, "OutcomeGrid: lowest outcome must be 0");
  for (std::size_t j = 0; j + 1 < levels.size(); ++j)
    require(levels[j] < levels[j + 1],
            "OutcomeGrid: levels must be strictly increasing");
  require(levels.back() <= 1.0, "OutcomeGrid: levels must not exceed 1");
}

CostFunction CostFunction::quadratic_cost(double strength) {
  require(strength > 0.0 && std::isfinite(strength),
          "CostFunction: quadratic strength must be positive");
  CostFunction c;
  c.family = Family::quadratic;
  c.strength = strength;
  return c;
}

CostFunction CostFunction::power_cost(double coeff, double exponent) {
  require(coeff > 0.0 && std::isfinite(coeff),
          "CostFunction: power coefficient must be positive");
  require(exponent >= 1.0 && std::isfinite(exponent),
          "CostFunction: power exponent must be >= 1");
  CostFunction c;
  c.family = Family::power;
  c.coeff = coeff;
  c.exponent = exponent;
  return c;
}

CostFunction CostFunction::tabulated_cost(std::vector<double> knots,
                                          std::vector<double> values) {
  require(knots.size() >= 2 && knots.size() == values.size(),
          "CostFunction: tabulated needs >= 2 matching knots/values");
  require(knots.front() == 0.0, "CostFunction: first knot must be 0");
  require(values.front() == 0.0, "CostFunction: c(0) must be 0");
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    require(knots[i] < knots[i + 1], "CostFunction: knots must increase");
  double prev_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    require(values[i] <= values[i + 1] + kEffortTol,
            "CostFunction: tabulated values must be nondecreasing");
    double slope = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]);
    require(slope >= prev_slope - 1e-9,
            "CostFunction: tabulated values must be convex");
    prev_slope = slope;
  }
  CostFunction c;
  c.family = Family::tabulated;
  c.knots = std::move(knots);
  c.values = std::move(values);
  return c;
}

Contract Contract::linear(const OutcomeGrid& grid, double beta) {
  Contract s;
  s.payments.reserve(grid.levels.size());
  for (double pi : grid.levels) s.payments.push_back(beta * pi);
  return s;
}

bool Contract::is_nonnegative(double tol) const {
  for (double v : payments)
    if (v < -tol) return false;
  return true;
}

bool Contract::is_monotone(double tol) const {
  for (std::size_t j = 0; j + 1 < payments.size(); ++j)
    if (payments[j + 1] < payments[j] - tol) return false;
  return is_nonnegative(tol);
}

bool Contract::is_bounded(double cap, double tol) const {
  for (double v : payments)
    if (v > cap + tol) return false;
  return true;
}

void Contract::validate_monotone_bounded() const {
  require(is_monotone(kEffortTol), "Contract: payments must be nonnegative and "
                                   "nondecreasing across outcomes");
  require(is_bounded(1.0, kEffortTol), "Contract: payments must not exceed 1");
}

AgentType::AgentType(OutcomeGrid grid, ProductionTechnology tech,
                     CostFunction cost, double effort_cap, double beta_max)
    : grid_(std::move(grid)),
      tech_(std::move(tech)),
      cost_(std::move(cost)),
      effort_cap_(effort_cap),
      beta_max_(beta_max) {
  grid_.validate();
  require(effort_cap_ > 0.0 && std::isfinite(effort_cap_),
          "AgentType: effort cap must be positive");
  const std::size_t m = grid_.levels.size();

  switch (tech_.family) {
    case ProductionTechnology::Family::bernoulli_effort:
      require(m == 2, "AgentType: bernoulli-effort needs exactly two outcomes");
      break;
    case ProductionTechnology::Family::smooth_parametric: {
      require(tech_.exponents.size() == m - 1,
              "AgentType: smooth-parametric needs one exponent per upper level");
      for (std::size_t j = 0; j < tech_.exponents.size(); ++j) {
        require(tech_.exponents[j] >= 1.0,
                "AgentType: smooth-parametric exponents must be >= 1");
        if (j > 0)
          require(tech_.exponents[j] <= tech_.exponents[j - 1] + kEffortTol,
                  "AgentType: exponents must be nonincreasing across levels "
                  "(pmf nonnegativity)");
      }
      break;
    }
    case ProductionTechnology::Family::tabulated: {
      require(tech_.ccdf_table.size() == m - 1,
              "AgentType: tabulated technology needs one row per upper level");
      require(tech_.knots.size() >= 2, "AgentType: tabulated needs >= 2 knots");
      require(tech_.knots.front() == 0.0,
              "AgentType: tabulated knots must start at 0");
      require(tech_.knots.back() >= effort_cap_ - kEffortTol,
              "AgentType: tabulated knots must cover [0, E]");
      for (const auto& row : tech_.ccdf_table) {
        require(row.size() == tech_.knots.size(),
                "AgentType: tabulated row length must match knots");
        for (std::size_t i = 0; i < row.size(); ++i) {
          require(row[i] >= -kEffortTol && row[i] <= 1.0 + kEffortTol,
                  "AgentType: tabulated ccdf values must lie in [0, 1]");
          if (i > 0)
            require(row[i] >= row[i - 1] - kEffortTol,
                    "AgentType: tabulated ccdf must be nondecreasing in effort");
        }
      }
      for (std::size_t r = 1; r < tech_.ccdf_table.size(); ++r)
        for (std::size_t i = 0; i < tech_.knots.size(); ++i)
          require(tech_.ccdf_table[r][i] <= tech_.ccdf_table[r - 1][i] + kEffortTol,
                  "AgentType: tabulated ccdf rows must be nonincreasing across "
                  "levels");
      for (const auto& row : tech_.ccdf_table)
        tab_ccdf_.emplace_back(tech_.knots, row);
      // The interpolants preserve per-row monotonicity but not automatically
      // the cross-level ordering between knots; sweep the pmf to reject
      // tables that break it.
      for (int i = 0; i < kSweepPoints; ++i) {
        double a = effort_cap_ * i / (kSweepPoints - 1);
        double prev = 1.0;
        for (const auto& interp : tab_ccdf_) {
          double g = interp.value(a);
          require(g <= prev + 1e-9,
                  "AgentType: tabulated pmf goes negative between knots");
          prev = g;
        }
      }
      break;
    }
  }

  switch (cost_.family) {
    case CostFunction::Family::quadratic:
      require(cost_.strength > 0.0, "AgentType: quadratic cost needs strength > 0");
      break;
    case CostFunction::Family::power:
      require(cost_.coeff > 0.0 && cost_.exponent >= 1.0,
              "AgentType: power cost needs coeff > 0, exponent >= 1");
      break;
    case CostFunction::Family::tabulated:
      require(!cost_.knots.empty() && cost_.knots.back() >= effort_cap_ - kEffortTol,
              "AgentType: tabulated cost must cover [0, E]");
      tab_cost_ = MonotoneCubic(cost_.knots, cost_.values);
      break;
    case CostFunction::Family::custom:
      require(static_cast<bool>(cost_.fn) && static_cast<bool>(cost_.fn_prime) &&
                  static_cast<bool>(cost_.fn_second),
              "AgentType: custom cost needs all three evaluators");
      break;
  }

  require(beta_max_ > 0.0 && std::isfinite(beta_max_),
          "AgentType: beta_max must be positive");
  double rpE = reward_prime(effort_cap_);
  if (rpE > 0.0)
    require(beta_max_ >= cost_prime(effort_cap_) / rpE - 1e-9,
            "AgentType: beta_max must cover c'(E)/r'(E)");
}

void AgentType::require_effort(double a) const {
  if (!(a >= -kEffortTol && a <= effort_cap_ + kEffortTol))
    throw std::domain_error("effort outside [0, E]");
}

double AgentType::ccdf(std::size_t j, double a) const {
  require_effort(a);
  if (j == 0) return 1.0;
  if (j >= grid_.levels.size()) return 0.0;
  double x = std::clamp(a / effort_cap_, 0.0, 1.0);
  switch (tech_.family) {
    case ProductionTechnology::Family::bernoulli_effort:
      return x;
    case ProductionTechnology::Family::smooth_parametric:
      return 1.0 - std::pow(1.0 - x, tech_.exponents[j - 1]);
    case ProductionTechnology::Family::tabulated:
      return std::clamp(tab_ccdf_[j - 1].value(std::clamp(a, 0.0, effort_cap_)),
                        0.0, 1.0);
  }
  return 0.0;
}

double AgentType::ccdf_prime(std::size_t j, double a) const {
  require_effort(a);
  if (j == 0 || j >= grid_.levels.size()) return 0.0;
  double x = std::clamp(a / effort_cap_, 0.0, 1.0);
  switch (tech_.family) {
    case ProductionTechnology::Family::bernoulli_effort:
      return 1.0 / effort_cap_;
    case ProductionTechnology::Family::smooth_parametric: {
      double q = tech_.exponents[j - 1];
      return q / effort_cap_ * std::pow(1.0 - x, q - 1.0);
    }
    case ProductionTechnology::Family::tabulated:
      return tab_ccdf_[j - 1].deriv(std::clamp(a, 0.0, effort_cap_));
  }
  return 0.0;
}

double AgentType::ccdf_second(std::size_t j, double a) const {
  require_effort(a);
  if (j == 0 || j >= grid_.levels.size()) return 0.0;
  double x = std::clamp(a / effort_cap_, 0.0, 1.0);
  switch (tech_.family) {
    case ProductionTechnology::Family::bernoulli_effort:
      return 0.0;
    case ProductionTechnology::Family::smooth_parametric: {
      double q = tech_.exponents[j - 1];
      if (q == 1.0) return 0.0;
      return -q * (q - 1.0) / (effort_cap_ * effort_cap_) *
             std::pow(1.0 - x, q - 2.0);
    }
    case ProductionTechnology::Family::tabulated:
      return tab_ccdf_[j - 1].second(std::clamp(a, 0.0, effort_cap_));
  }
  return 0.0;
}

std::vector<double> AgentType::pmf(double a) const {
  const std::size_t m = grid_.levels.size();
  std::vector<double> f(m);
  double upper = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    double next = (j + 1 < m) ? ccdf(j + 1, a) : 0.0;
    f[j] = upper - next;
    upper = next;
  }
  return f;
}

double AgentType::cost(double a) const {
  require_effort(a);
  switch (cost_.family) {
    case CostFunction::Family::quadratic:
      return 0.5 * cost_.strength * a * a;
    case CostFunction::Family::power:
      return cost_.coeff * std::pow(std::max(a, 0.0), cost_.exponent);
    case CostFunction::Family::tabulated:
      return tab_cost_.value(std::clamp(a, 0.0, effort_cap_));
    case CostFunction::Family::custom:
      return cost_.fn(a);
  }
  return 0.0;
}

double AgentType::cost_prime(double a) const {
  require_effort(a);
  switch (cost_.family) {
    case CostFunction::Family::quadratic:
      return cost_.strength * a;
    case CostFunction::Family::power:
      return cost_.coeff * cost_.exponent *
             std::pow(std::max(a, 0.0), cost_.exponent - 1.0);
    case CostFunction::Family::tabulated:
      return tab_cost_.deriv(std::clamp(a, 0.0, effort_cap_));
    case CostFunction::Family::custom:
      return cost_.fn_prime(a);
  }
  return 0.0;
}

double AgentType::cost_second(double a) const {
  require_effort(a);
  switch (cost_.family) {
    case CostFunction::Family::quadratic:
      return cost_.strength;
    case CostFunction::Family::power: {
      double p = cost_.exponent;
      if (p == 1.0) return 0.0;
      return cost_.coeff * p * (p - 1.0) * std::pow(std::max(a, 0.0), p - 2.0);
    }
    case CostFunction::Family::tabulated:
      return tab_cost_.second(std::clamp(a, 0.0, effort_cap_));
    case CostFunction::Family::custom:
      return cost_.fn_second(a);
  }
  return 0.0;
}

double AgentType::expected_reward(double a) const {
  double r = 0.0;
  for (std::size_t j = 1; j < grid_.levels.size(); ++j)
    r += (grid_.levels[j] - grid_.levels[j - 1]) * ccdf(j, a);
  return r;
}

double AgentType::reward_prime(double a) const {
  double r = 0.0;
  for (std::size_t j = 1; j < grid_.levels.size(); ++j)
    r += (grid_.levels[j] - grid_.levels[j - 1]) * ccdf_prime(j, a);
  return r;
}

namespace {

// Payment expectation sum_j s_j f_j(a) in telescoped form
// s_0 + sum_{j>=1} (s_j - s_{j-1}) G_j(a).
double expected_payment(const AgentType& type, const Contract& s, double a) {
  if (s.payments.size() != type.level_count())
    throw std::invalid_argument("contract size must match the outcome grid");
  double pay = s.payments[0];
  for (std::size_t j = 1; j < s.payments.size(); ++j)
    pay += (s.payments[j] - s.payments[j - 1]) * type.ccdf(j, a);
  return pay;
}

}  // namespace

double agent_utility(const AgentType& type, const Contract& s, double a) {
  return expected_payment(type, s, a) - type.cost(a);
}

double agent_utility(const AgentType& type, const LinearContract& s, double a) {
  return s.beta * type.expected_reward(a) - type.cost(a);
}

double principal_utility(const AgentType& type, const Contract& s, double a) {
  return type.expected_reward(a) - expected_payment(type, s, a);
}

double principal_utility(const AgentType& type, const LinearContract& s,
                         double a) {
  return (1.0 - s.beta) * type.expected_reward(a);
}

namespace {

double grid_best_response(const AgentType& type, const Contract& s) {
  const int n = 10001;
  const double E = type.effort_cap();
  double best_a = 0.0, best_u = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < n; ++i) {
    double a = E * i / (n - 1);
    double u = agent_utility(type, s, a);
    if (u > best_u) {
      best_u = u;
      best_a = a;
      best_i = i;
    }
  }
  double lo = E * std::max(best_i - 1, 0) / (n - 1);
  double hi = E * std::min(best_i + 1, n - 1) / (n - 1);
  double refined = golden_section_max(
      [&](double a) { return agent_utility(type, s, a); }, lo, hi, 1e-9);
  return agent_utility(type, s, refined) >= best_u ? refined : best_a;
}

}  // namespace

double best_response(const AgentType& type, const Contract& s,
                     BestResponseMode mode) {
  bool monotone = s.is_monotone(kEffortTol);
  if (mode == BestResponseMode::grid) return grid_best_response(type, s);
  bool certified_ok = monotone && validate_assumptions(type).sdfc_holds;
  if (mode == BestResponseMode::certified) {
    if (!monotone)
      throw std::invalid_argument(
          "best_response: certified path needs a monotone contract (agent "
          "utility concavity is not guaranteed otherwise)");
    if (!certified_ok)
      throw std::invalid_argument(
          "best_response: type failed validate_assumptions (sup G'' < inf c'' "
          "with inf c'' > 0 required for the certified path)");
  }
  if (!certified_ok) return grid_best_response(type, s);
  return golden_section_max(
      [&](double a) { return agent_utility(type, s, a); }, 0.0,
      type.effort_cap(), 1e-9);
}

double best_response_linear(const AgentType& type, const LinearContract& s) {
  if (!(s.beta >= 0.0) || !std::isfinite(s.beta))
    throw std::invalid_argument("best_response_linear: beta must be >= 0");
  const double E = type.effort_cap();
  auto foc = [&](double a) {
    return type.cost_prime(a) - s.beta * type.reward_prime(a);
  };
  if (foc(0.0) > 0.0) return 0.0;
  if (foc(E) < 0.0) return E;
  return bisect_root(foc, 0.0, E, 1e-10);
}

std::size_t sample_outcome(const AgentType& type, double a, Rng& rng) {
  type.require_effort(a);
  double u = rng.uniform();
  std::size_t j = 0;
  while (j + 1 < type.level_count() && u < type.ccdf(j + 1, a)) ++j;
  return j;
}

AssumptionReport validate_assumptions(const AgentType& type) {
  const auto& tech = type.technology();
  const auto& cost = type.cost_function();
  const double E = type.effort_cap();
  AssumptionReport rep;

  switch (tech.family) {
    case ProductionTechnology::Family::bernoulli_effort:
      rep.outcome_grad_bound = 1.0 / E;
      rep.outcome_curvature_max = 0.0;
      break;
    case ProductionTechnology::Family::smooth_parametric: {
      double L = 0.0, mu = -std::numeric_limits<double>::infinity();
      for (double q : tech.exponents) {
        L = std::max(L, q / E);
        double sup_second;
        if (q == 1.0 || q > 2.0)
          sup_second = 0.0;  // G'' == 0, or -> 0 at a = E
        else
          sup_second = -q * (q - 1.0) / (E * E);  // attained at a = 0
        mu = std::max(mu, sup_second);
      }
      rep.outcome_grad_bound = L;
      rep.outcome_curvature_max = mu;
      break;
    }
    case ProductionTechnology::Family::tabulated: {
      if (tech.knots.size() < 4)
        throw std::runtime_error(
            "validate_assumptions: tabulated grid too coarse for the "
            "curvature sweep (need >= 4 knots)");
      double L = 0.0, mu = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 1; j < type.level_count(); ++j) {
        for (int i = 0; i < kSweepPoints; ++i) {
          double a = E * i / (kSweepPoints - 1);
          L = std::max(L, std::fabs(type.ccdf_prime(j, a)));
          mu = std::max(mu, type.ccdf_second(j, a));
        }
      }
      rep.outcome_grad_bound = L;
      rep.outcome_curvature_max = mu;
      break;
    }
  }

  switch (cost.family) {
    case CostFunction::Family::quadratic:
      rep.cost_curvature_min = cost.strength;
      break;
    case CostFunction::Family::power: {
      double p = cost.exponent;
      if (p == 1.0 || p > 2.0)
        rep.cost_curvature_min = 0.0;  // flat, or -> 0 at a = 0
      else
        rep.cost_curvature_min =
            cost.coeff * p * (p - 1.0) * std::pow(E, p - 2.0);
      break;
    }
    case CostFunction::Family::tabulated: {
      if (cost.knots.size() < 4)
        throw std::runtime_error(
            "validate_assumptions: tabulated cost grid too coarse for the "
            "curvature sweep (need >= 4 knots)");
      double lam = std::numeric_limits<double>::infinity();
      for (int i = 0; i < kSweepPoints; ++i) {
        double a = E * i / (kSweepPoints - 1);
        lam = std::min(lam, type.cost_second(a));
      }
      rep.cost_curvature_min = lam;
      break;
    }
    case CostFunction::Family::custom:
      rep.cost_curvature_min = cost.custom_curvature_min;
      break;
  }

  rep.sdfc_holds = rep.cost_curvature_min > rep.outcome_curvature_max &&
                   rep.cost_curvature_min > 0.0;
  if (rep.sdfc_holds) {
    double gap = rep.cost_curvature_min - rep.outcome_curvature_max;
    double L = rep.outcome_grad_bound;
    rep.principal_utility_lipschitz = 4.0 * L * L / gap + 2.0;
    rep.agent_response_lipschitz = 2.0 * L / gap;
  } else {
    rep.principal_utility_lipschitz = std::numeric_limits<double>::infinity();
    rep.agent_response_lipschitz = std::numeric_limits<double>::infinity();
  }
  return rep;
}

}  // namespace pact
