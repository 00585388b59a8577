#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pact/numeric.hpp"
#include "pact/rng.hpp"

namespace pact {

class Rng;

// Ordered outcome values pi_0 < ... < pi_{m-1}; pi_0 == 0, pi_{m-1} <= 1.
struct OutcomeGrid {
  std::vector<double> levels;

  std::size_t size() const { return levels.size(); }
  void validate() const;  // throws std::invalid_argument
};

// Outcome technology: complementary CDF G_j(a) = P(outcome index >= j) for
// effort a in [0, E]. G_0 == 1 identically; G_j nonincreasing in j,
// nondecreasing in a.
struct ProductionTechnology {
  enum class Family { bernoulli_effort, smooth_parametric, tabulated };

  Family family = Family::bernoulli_effort;
  // smooth_parametric: exponents q_j >= 1 for levels 1..m-1, nonincreasing in
  // j so the pmf stays nonnegative; G_j(a) = 1 - (1 - a/E)^{q_j}.
  std::vector<double> exponents;
  // tabulated: shared effort knots in [0, E] and, per level 1..m-1, the G_j
  // values at those knots (each row nondecreasing, rows nonincreasing in j).
  std::vector<double> knots;
  std::vector<std::vector<double>> ccdf_table;
};

// Effort cost: c(0) = 0, increasing and convex on [0, E].
struct CostFunction {
  enum class Family { quadratic, power, tabulated, custom };

  Family family = Family::quadratic;
  double strength = 1.0;            // quadratic: c(a) = 0.5 * strength * a^2
  double coeff = 1.0;               // power: c(a) = coeff * a^exponent
  double exponent = 2.0;            // power: exponent >= 1
  std::vector<double> knots;        // tabulated (convex data required)
  std::vector<double> values;
  // custom: evaluator bundle plus a declared lower bound on c'' over [0, E];
  // not serializable.
  std::function<double(double)> fn, fn_prime, fn_second;
  double custom_curvature_min = 0.0;

  static CostFunction quadratic_cost(double strength);
  static CostFunction power_cost(double coeff, double exponent);
  static CostFunction tabulated_cost(std::vector<double> knots,
                                     std::vector<double> values);
};

// Payment vector aligned with the outcome grid.
struct Contract {
  std::vector<double> payments;

  static Contract linear(const OutcomeGrid& grid, double beta);
  bool is_nonnegative(double tol = 0.0) const;
  bool is_monotone(double tol = 0.0) const;
  bool is_bounded(double cap = 1.0, double tol = 0.0) const;
  void validate_monotone_bounded() const;  // throws std::invalid_argument
};

struct LinearContract {
  double beta = 0.0;
};

// Regularity summary for one agent type: derivative/curvature bounds of the
// outcome technology and cost, whether the smooth-curvature condition
// sup_a G'' < inf_a c'' holds (with inf c'' > 0), and the implied Lipschitz
// constants for principal utility and agent response in the L1 payment metric.
struct AssumptionReport {
  double outcome_grad_bound = 0.0;    // sup_{j,a} |G_j'(a)|
  double outcome_curvature_max = 0.0; // sup_{j,a} G_j''(a)
  double cost_curvature_min = 0.0;    // inf_a c''(a)
  bool sdfc_holds = false;
  double principal_utility_lipschitz = 0.0;  // 4L^2/(lambda-mu) + 2
  double agent_response_lipschitz = 0.0;     // 2L/(lambda-mu)
};

// A complete agent: outcome grid, technology, cost, effort cap E, and the
// largest linear slope the caller intends to post (beta_max >= c'(E)/r'(E)
// whenever r'(E) > 0, so the whole best-response range is reachable).
class AgentType {
 public:
  AgentType(OutcomeGrid grid, ProductionTechnology tech, CostFunction cost,
            double effort_cap, double beta_max);

  const OutcomeGrid& outcomes() const { return grid_; }
  const ProductionTechnology& technology() const { return tech_; }
  const CostFunction& cost_function() const { return cost_; }
  std::size_t level_count() const { return grid_.levels.size(); }
  double effort_cap() const { return effort_cap_; }
  double beta_max() const { return beta_max_; }

  // G_j(a) for level index j in [0, m-1]; G_0 == 1. Throws std::domain_error
  // for effort outside [0, E].
  double ccdf(std::size_t j, double a) const;
  double ccdf_prime(std::size_t j, double a) const;
  double ccdf_second(std::size_t j, double a) const;
  std::vector<double> pmf(double a) const;  // f_j(a) = G_j(a) - G_{j+1}(a)

  double cost(double a) const;
  double cost_prime(double a) const;
  double cost_second(double a) const;

  double expected_reward(double a) const;  // r(a) = sum_j pi_j f_j(a)
  double reward_prime(double a) const;     // r'(a) = sum_j dpi_j G_j'(a)

  void require_effort(double a) const;  // throws std::domain_error

 private:
  OutcomeGrid grid_;
  ProductionTechnology tech_;
  CostFunction cost_;
  double effort_cap_;
  double beta_max_;
  std::vector<MonotoneCubic> tab_ccdf_;  // tabulated technology, levels 1..m-1
  MonotoneCubic tab_cost_;
};

enum class BestResponseMode { automatic, certified, grid };

// sum_j s_j f_j(a) - c(a), evaluated in the telescoped form
// sum_j (s_j - s_{j-1}) G_j(a) - c(a); the two agree by Abel summation.
double agent_utility(const AgentType& type, const Contract& s, double a);
double agent_utility(const AgentType& type, const LinearContract& s, double a);

// sum_j (pi_j - s_j) f_j(a)
double principal_utility(const AgentType& type, const Contract& s, double a);
double principal_utility(const AgentType& type, const LinearContract& s,
                         double a);

// Argmax of agent utility over [0, E]. certified: golden-section, valid only
// when the type passes validate_assumptions and s is monotone (throws
// std::invalid_argument otherwise). grid: dense scan (1e4 points) plus local
// refinement, no optimality certificate. automatic picks certified when its
// preconditions hold, else grid.
double best_response(const AgentType& type, const Contract& s,
                     BestResponseMode mode = BestResponseMode::automatic);

// Best response to a linear contract via the first-order condition
// c'(a) = beta * r'(a): 0 if c'(0) >= beta r'(0), E if c'(E) <= beta r'(E),
// else the unique interior root (bisection to 1e-10). Ties at the case
// boundaries fall through to the root branch.
double best_response_linear(const AgentType& type, const LinearContract& s);

// Draws an outcome index from f(a): largest j with u < G_j(a), u uniform.
std::size_t sample_outcome(const AgentType& type, double a, Rng& rng);

// Derivative and curvature bounds: closed-form for the built-in families, a
// dense finite-difference sweep for tabulated ones (throws std::runtime_error
// when a tabulated grid is too coarse to sweep, < 4 knots).
AssumptionReport validate_assumptions(const AgentType& type);

}  // namespace pact
