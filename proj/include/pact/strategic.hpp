#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pact/env.hpp"
#include "pact/rng.hpp"
#include "pact/trace.hpp"

namespace pact {

// A discounted agent facing a repeated linear-contract mechanism. Effort is
// measured on the expected-output scale: under slope beta, supplying effort a
// yields output y = clamp(a + sigma*z, 0, 1) and agent utility beta*a - c(a),
// so the truthful response maximizes that concave objective over [0, E].
// Policies:
//   truthful: myopic best response every round.
//   budgeted_adversary: shifts effort by the largest deviation an optimally
//     discounted agent could afford (boosting the arm it likes best and
//     suppressing the rest), clipped so lambda*delta^2 stays within the
//     deviation budget implied by the mechanism's delay.
//   underperform_then_exploit: shaves a fixed amount of effort during an
//     initial phase of the horizon, then reverts to truthful play. Not
//     budget-constrained; a stress model outside the guarantee.
struct StrategicAgentModel {
  enum class Policy { truthful, budgeted_adversary, underperform_then_exploit };

  AgentType type;
  double gamma = 0.9;  // discount factor, in (0, 1)
  Policy policy = Policy::truthful;
  double underperform_fraction = 0.1;  // horizon share spent shading
  double underperform_shift = 0.1;     // effort shaved during that phase
};

// Parameters of the delayed-elimination mechanism.
struct MechanismConfig {
  std::vector<LinearContract> arms;  // candidate slopes, each in [0, 1]
  std::size_t horizon = 0;
  std::size_t delay = 0;        // indices ignore the last `delay` rounds
  double perturbation = 0.0;    // the +/- delta widening every index
  double sigma = 0.1;           // output noise scale
  double log_conf_const = 2.0;  // the 2 in sqrt(2 log T / |S|)
};

// Bookkeeping for one candidate arm. Samples are (timestamp, observed
// principal utility) pairs appended in timestamp order; the index statistics
// use only the delayed prefix S = {1 <= tau < cutoff}. Eliminated arms are
// never replayed.
struct ArmState {
  std::size_t id = 0;
  double beta = 0.0;
  bool active = true;
  std::vector<std::pair<std::size_t, double>> samples;

  // Advances the delayed prefix to timestamps < cutoff. Cutoffs must be
  // nondecreasing across calls.
  void refresh(std::size_t cutoff);
  std::size_t count() const { return n_delayed_; }
  double mean() const;
  // conf_num is (log-confidence constant) * log(horizon); empty prefixes
  // give +inf / -inf so unseen arms are never eliminated.
  double ucb(double conf_num, double perturbation) const;
  double lcb(double conf_num, double perturbation) const;

 private:
  std::size_t cursor_ = 0;
  std::size_t n_delayed_ = 0;
  double sum_delayed_ = 0.0;
};

// Delay making any single-round deviation unprofitable up to 1/T:
// D = ceil(ln(T^2 * T_gamma / lambda) / ln(1/gamma)), clamped at 0, so that
// gamma^D * T_gamma / lambda <= 1/T^2. Throws std::domain_error unless
// 0 < gamma < 1, lambda > 0 and T >= 1.
std::size_t choose_delay(std::size_t horizon, double gamma, double lambda);

// T_gamma = sum_{t=1..T} gamma^t = gamma*(1 - gamma^T)/(1 - gamma).
double discounted_horizon(std::size_t horizon, double gamma);

// Largest total utility a deviation today can unlock after the delay:
// min(1, E) * gamma^delay * T_gamma (output is normalized to [0, 1], so the
// per-round take is capped at 1 even when E exceeds 1). An optimal agent
// keeps lambda*delta_t^2 within this budget.
double deviation_budget(const AgentType& type, std::size_t horizon,
                        double gamma, std::size_t delay);

// Truthful response on the expected-output scale: argmax over [0, E] of
// beta*a - c(a). Closed form for quadratic and power costs, golden-section
// search otherwise.
double strategic_response(const AgentType& type, double beta);

// Forgone agent utility from playing a_played instead of the truthful
// response under slope beta; nonnegative, and at least (lambda/2)*delta^2
// when c is lambda-strongly convex.
double deviation_cost(const AgentType& type, double beta, double a_played);

// Arm count for the continuous slope space: K = ceil((T log T)^(1/4)),
// always >= 2. Throws std::invalid_argument when horizon < 2.
std::size_t grid_for_continuous(std::size_t horizon);

// The candidate set {1/K, 2/K, ..., K/K} (zero excluded, one included).
std::vector<LinearContract> grid_arms(std::size_t k);

// Round-robin over active arms; after every full sweep, recompute the
// delayed UCB/LCB indices and eliminate every arm whose UCB falls below the
// best LCB. The trace logs one row per round with realized utility
// (1-beta)*y and pseudo-regret against max_arm (1-beta)*a(beta); extra
// columns delta_t, active_arm_count, D, gamma; metadata records the policy,
// the surviving arms, and (for the budgeted adversary) the deviation budget.
RegretTrace run_delayed_elimination(const MechanismConfig& cfg,
                                    const StrategicAgentModel& agent,
                                    Rng& rng);

// Monotone-contract extension: run the repeated-query learner's sampling
// schedule against the strategic agent, wait choose_delay(horizon) rounds
// under the null contract so the estimates' rounds can no longer profit from
// manipulation, then post the converted contract for the remaining rounds.
// Throws std::invalid_argument when the horizon cannot fit sampling plus the
// delay plus one posting round.
RegretTrace run_lp_commit(const StrategicAgentModel& agent, double epsilon,
                          double delta_conf, std::size_t horizon, Rng& rng);

}  // namespace pact
