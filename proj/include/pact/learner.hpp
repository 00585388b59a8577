#pragma once

#include <cstddef>
#include <vector>

#include "pact/env.hpp"
#include "pact/lp.hpp"
#include "pact/rng.hpp"
#include "pact/trace.hpp"

namespace pact {

// Parameters of the repeated-query contract learner: post each slope on an
// arithmetic grid N times, estimate the outcome distribution per slope, then
// pick a payment vector by linear programming over the confidence bands.
struct LearnerConfig {
  double epsilon = 0.0;     // target accuracy, in (0, 1)
  double delta_conf = 0.0;  // failure probability, in (0, 1)
  double lambda = 0.0;      // inf c''
  double grad_bound = 0.0;  // L = sup_j |G_j'|
  double r_prime_0 = 0.0;   // marginal reward at zero effort
  double c_prime_cap = 0.0; // c'(E)
  double beta_max = 0.0;
  double eps_c = 0.0;             // grid step
  std::size_t grid_size = 0;      // floor(beta_max/eps_c) + 1
  std::size_t samples_per_arm = 0;

  // Derives eps_c = min(lambda*eps/(2L^2), (lambda/r'(0)) / (L + c'(E))) and
  // N = ceil(2*log(beta_max/(delta_conf*eps_c)) / eps^2). Requires a type
  // whose assumption report certifies sup G'' < inf c''; throws
  // std::invalid_argument otherwise or when epsilon/delta_conf leave (0, 1)
  // or r'(0) <= 0.
  static LearnerConfig from_env(const AgentType& env, double epsilon,
                                double delta_conf);
};

// Estimates gathered at one grid slope.
struct EstimationRow {
  double beta = 0.0;
  std::vector<double> g_hat;  // empirical ccdf per level; g_hat[0] == 1
  double r_hat = 0.0;         // mean realized outcome value
  double c_lcb = 0.0;
  double c_ucb = 0.0;
  std::size_t samples = 0;
};

struct EstimationTable {
  std::vector<EstimationRow> rows;
  std::size_t levels = 0;
};

// A payment vector together with the action it recommends and the incentive
// slack delta the pair is certified for (the agent can gain at most delta by
// deviating from the recommended action).
struct IcContract {
  Contract payments;
  std::size_t recommended_index = 0;
  double ic_slack = 0.0;
  double utility_estimate = 0.0;
};

struct FamilyResult {
  std::size_t index = 0;  // argmax of apx; ties to the smallest index
  Contract contract;
  double apx = 0.0;            // r_hat(index) + LP value
  std::vector<char> feasible;  // per grid index
};

struct LearnResult {
  LearnerConfig config;
  EstimationTable table;
  std::size_t chosen_index = 0;
  double chosen_beta = 0.0;
  Contract raw_contract;     // LP solution; delta-IC at the chosen action
  double apx = 0.0;          // estimated principal utility of the raw pair
  double conversion_delta = 0.0;  // min(22*epsilon, 1)
  IcContract posted;         // mixture with the identity contract; exact IC
  std::size_t total_samples = 0;
};

struct OracleResult {
  double value = 0.0;
  Contract contract;
  double action = 0.0;
};

// The slope grid {0, eps_c, 2*eps_c, ...} up to beta_max. Throws
// std::invalid_argument when eps_c >= beta_max (degenerate grid).
std::vector<LinearContract> discretize_contracts(const LearnerConfig& cfg);

// Queries each grid slope n_samples times: the simulated agent best-responds,
// an outcome is drawn, and the empirical ccdf and mean outcome are recorded.
// When trace is non-null every query is logged (arm_id = grid index,
// realized_utility = outcome value minus linear payment) against the
// already-set trace->benchmark_value.
EstimationTable collect_and_estimate(const AgentType& env,
                                     const std::vector<LinearContract>& grid,
                                     std::size_t n_samples, Rng& rng,
                                     RegretTrace* trace = nullptr);

// Fills c_lcb/c_ucb by the telescoping payment bounds
//   c_lcb(i) = sum_{j<=i} beta_{j-1} (r_hat_j - r_hat_{j-1}) - 3*eps
//   c_ucb(i) = sum_{j<=i} beta_j     (r_hat_j - r_hat_{j-1}) + 3*eps
// so index 0 gets [-3*eps, +3*eps].
void cost_bounds(EstimationTable& table, double eps);

// The payment-minimizing program targeting grid action `index`: variables
// s_0..s_{m-1} in [0, 1], rows s_j >= s_{j-1}, and for every grid action k a
// pessimistic incentive row
//   u_ucb(index; s) >= u_lcb(k; s) - eps
// where u_ucb uses ccdf band min(g_hat + eps, 1) with cost c_lcb, and u_lcb
// uses max(g_hat - eps, 0) with cost c_ucb, both in telescoped form. The
// objective is the negated estimated payment; solve_family adds r_hat(index)
// to obtain the utility estimate.
LinearProgram build_lp(std::size_t index, const EstimationTable& table,
                       double eps);

// Solves the whole family and returns the best feasible program. Throws
// std::runtime_error when every program is infeasible (estimation failure).
FamilyResult solve_family(const EstimationTable& table, double eps);

// s' = (1 - sqrt(delta)) * s + sqrt(delta) * pi. Mixing toward the identity
// contract turns a delta-IC recommendation into an exactly incentive
// compatible one at a bounded utility loss. Throws std::domain_error unless
// 0 <= delta <= 1; preserves monotonicity and nonnegativity.
Contract ic_convert(const Contract& s, double delta,
                    const OutcomeGrid& outcomes);

// Full pipeline: configure, discretize, sample, bound costs, solve the LP
// family, and convert the winner with delta = min(22*epsilon, 1).
LearnResult learn_optimal_contract(const AgentType& env, double epsilon,
                                   double delta_conf, Rng& rng,
                                   RegretTrace* trace = nullptr);

// Ground-truth benchmark: on the effort grid {0, fine_step, ..., E}, solve
// the true-parameter minimum-payment program for each action (incentive rows
// generated lazily, most-violated first) and maximize r(a) - MinPay(a) over
// implementable actions. Deterministic; no sampling involved.
OracleResult oracle_opt(const AgentType& env, double fine_step);

}  // namespace pact
