#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pact/rng.hpp"

namespace pact {

// Production technology for a team of n agents with unit effort cost. The
// explicitly additive form factors as f(a) = h(sum_i g_i(a_i)) with h
// increasing and every g_i strictly increasing and concave; equilibria then
// collapse to a scalar fixed point in the aggregate t = sum_i g_i(a_i).
// General smooth instances carry f and its gradient and are solved by a
// damped Newton iteration on the first-order conditions.
struct TeamProduction {
  enum class Form { explicitly_additive, general_smooth };
  // Which factory built this instance; parameters are kept alongside so the
  // built-in families serialize losslessly. Custom instances carry none.
  enum class Builtin { none, cobb_douglas, ces };

  Form form = Form::explicitly_additive;
  std::size_t n = 0;

  Builtin builtin = Builtin::none;
  double scale = 0.0;              // cobb_douglas
  std::vector<double> exponents;   // cobb_douglas
  std::vector<double> weights;     // ces
  double decay = 0.0, returns = 0.0;  // ces k and d

  // Explicitly additive pieces. marginal_inverse[i] solves 1/g_i'(a) = s for
  // a; analytic for the built-in families, bisection fallback when empty.
  std::function<double(double)> h, h_prime;
  std::vector<std::function<double(double)>> g, g_prime;
  std::vector<std::function<double(double)>> marginal_inverse;
  // Open domain of the aggregate sum_i g_i; the fixed point is bracketed
  // strictly inside it.
  double aggregate_lo = 0.0, aggregate_hi = 0.0;

  // General smooth pieces.
  std::function<double(const std::vector<double>&)> f;
  std::function<std::vector<double>(const std::vector<double>&)> grad;

  // scale * prod_i a_i^{k_i} with k_i > 0 and sum k_i < 1.
  static TeamProduction cobb_douglas(double scale,
                                     std::vector<double> exponents);
  // (sum_i rho_i a_i^{-k})^{-d/k} with rho_i > 0, k > 0, 0 < d < 1; the
  // negative-substitution CES family, every agent essential.
  static TeamProduction ces(std::vector<double> weights, double k, double d);
  static TeamProduction custom_additive(
      std::function<double(double)> h, std::function<double(double)> h_prime,
      std::vector<std::function<double(double)>> g,
      std::vector<std::function<double(double)>> g_prime,
      double aggregate_lo, double aggregate_hi);
  static TeamProduction general(
      std::function<double(const std::vector<double>&)> f,
      std::function<std::vector<double>(const std::vector<double>&)> grad,
      std::size_t n);

  double value(const std::vector<double>& a) const;  // f(a)
};

// Per-agent output shares posted by the principal.
struct ContractProfile {
  std::vector<double> shares;

  double total() const;
  // Size match and nonnegative finite shares; throws std::invalid_argument.
  void validate(std::size_t n) const;
};

// Equilibrium action profile satisfying beta_i * d_i f(a) = 1, or the
// excluded all-zero profile when some share is zero.
struct EquilibriumResult {
  std::vector<double> actions;
  double production = 0.0;
  double foc_residual = 0.0;     // max_i |beta_i d_i f(a) - 1|
  double fixed_point_gap = 0.0;  // |t - sum_i g_i(a_i)|, additive path only
  std::string method;
  std::size_t iterations = 0;
  bool degenerate = false;
};

EquilibriumResult equilibrium(const TeamProduction& prod,
                              const ContractProfile& beta);

// f(a(beta)): production at the equilibrium induced by the contract.
double production_of_contract(const TeamProduction& prod,
                              const ContractProfile& beta);

// Samples random triples (beta, beta', lambda) on the open share simplex and
// counts failures of f(a(mix)) >= min(f(a(beta)), f(a(beta'))) - 1e-8.
struct QuasiconcavityReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_slack = 0.0;  // most negative margin observed
};

QuasiconcavityReport quasiconcavity_check(const TeamProduction& prod,
                                          std::size_t samples, Rng& rng);

// min sum_i beta_i subject to f(a(beta)) >= k, solved with production-oracle
// queries only: an outer LP over accumulated supporting hyperplanes proposes
// probes, infeasible probes are pushed to the constraint boundary along the
// all-ones direction (or toward a feasible anchor), and each boundary point
// contributes a finite-difference cut. Terminates when the bracket between
// the best feasible total and the LP lower bound closes to eps.
struct MinContractResult {
  double objective = 0.0;  // +infinity when k is unattainable within the cap
  ContractProfile contract;
  bool attainable = false;
  std::size_t oracle_queries = 0;  // equilibrium solves consumed
  std::size_t cuts = 0;
};

MinContractResult min_contract(const TeamProduction& prod, double k,
                               double eps, double share_cap = 2.0);

// One sweep step of the optimal-contract search.
struct SweepRow {
  double k = 0.0;
  double objective = 0.0;  // Obj(k)
  double utility = 0.0;    // (1 - Obj(k)) * k
  std::size_t queries = 0;
};

struct TeamSweepResult {
  ContractProfile contract;
  double utility = 0.0;
  double k_at_best = 0.0;
  std::size_t oracle_queries = 0;
  std::vector<SweepRow> rows;
};

// Sweeps k = 0, eps, 2 eps, ... through min_contract and returns the profile
// maximizing (1 - Obj(k)) * k; stops once Obj(k) >= 1 or k is unattainable.
TeamSweepResult find_optimal_team_contract(const TeamProduction& prod,
                                           double eps);

// Largest production reachable on the share simplex sum beta_i <= 1, located
// by bisection on the attainability of min_contract with unit cap.
double estimate_k_max(const TeamProduction& prod, double eps);

}  // namespace pact
