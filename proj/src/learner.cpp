#include "pact/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pact/numeric.hpp"

namespace pact {
namespace {

// floor(num/den) robust to num being an exact multiple of den.
std::size_t nudged_floor_ratio(double num, double den) {
  double q = num / den + 1e-9;
  if (q < 0.0) return 0;
  return static_cast<std::size_t>(q);
}

// Clipped confidence-band ccdf values at one table row; level 0 stays 1 and
// a virtual level m is 0, so telescoped coefficients stay nonnegative.
double ccdf_ucb(const EstimationRow& row, std::size_t j, std::size_t m,
                double eps) {
  if (j == 0) return 1.0;
  if (j >= m) return 0.0;
  return std::min(row.g_hat[j] + eps, 1.0);
}

double ccdf_lcb(const EstimationRow& row, std::size_t j, std::size_t m,
                double eps) {
  if (j == 0) return 1.0;
  if (j >= m) return 0.0;
  return std::max(row.g_hat[j] - eps, 0.0);
}

}  // namespace

LearnerConfig LearnerConfig::from_env(const AgentType& env, double epsilon,
                                      double delta_conf) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("learner: epsilon must lie in (0, 1)");
  if (!(delta_conf > 0.0) || !(delta_conf < 1.0))
    throw std::invalid_argument("learner: delta_conf must lie in (0, 1)");
  AssumptionReport rep = validate_assumptions(env);
  if (!rep.sdfc_holds)
    throw std::invalid_argument(
        "learner: type fails the curvature condition sup G'' < inf c''");
  double r0 = env.reward_prime(0.0);
  if (!(r0 > 0.0))
    throw std::invalid_argument("learner: marginal reward at 0 must be > 0");

  LearnerConfig cfg;
  cfg.epsilon = epsilon;
  cfg.delta_conf = delta_conf;
  cfg.lambda = rep.cost_curvature_min;
  cfg.grad_bound = rep.outcome_grad_bound;
  cfg.r_prime_0 = r0;
  cfg.c_prime_cap = env.cost_prime(env.effort_cap());
  cfg.beta_max = env.beta_max();
  double step_main =
      cfg.lambda * epsilon / (2.0 * cfg.grad_bound * cfg.grad_bound);
  double step_cap =
      (cfg.lambda / r0) / (cfg.grad_bound + cfg.c_prime_cap);
  cfg.eps_c = std::min(step_main, step_cap);
  cfg.grid_size = nudged_floor_ratio(cfg.beta_max, cfg.eps_c) + 1;
  double n_real = 2.0 * std::log(cfg.beta_max / (delta_conf * cfg.eps_c)) /
                  (epsilon * epsilon);
  cfg.samples_per_arm =
      n_real <= 1.0 ? 1 : static_cast<std::size_t>(std::ceil(n_real));
  return cfg;
}

std::vector<LinearContract> discretize_contracts(const LearnerConfig& cfg) {
  if (!(cfg.eps_c > 0.0) || !(cfg.beta_max > 0.0) ||
      cfg.eps_c >= cfg.beta_max)
    throw std::invalid_argument(
        "learner: degenerate slope grid (eps_c must lie in (0, beta_max))");
  std::size_t count = nudged_floor_ratio(cfg.beta_max, cfg.eps_c) + 1;
  std::vector<LinearContract> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i].beta = std::min(static_cast<double>(i) * cfg.eps_c, cfg.beta_max);
  return grid;
}

EstimationTable collect_and_estimate(const AgentType& env,
                                     const std::vector<LinearContract>& grid,
                                     std::size_t n_samples, Rng& rng,
                                     RegretTrace* trace) {
  if (n_samples == 0)
    throw std::invalid_argument("learner: need at least one sample per arm");
  std::size_t m = env.level_count();
  EstimationTable table;
  table.levels = m;
  table.rows.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EstimationRow& row = table.rows[i];
    row.beta = grid[i].beta;
    row.samples = n_samples;
    double a = best_response_linear(env, grid[i]);
    std::string repr;
    if (trace) repr = "beta=" + format_double(row.beta);
    std::vector<std::size_t> hits(m, 0);
    double pi_sum = 0.0;
    for (std::size_t n = 0; n < n_samples; ++n) {
      std::size_t idx = sample_outcome(env, a, rng);
      hits[idx] += 1;
      double pi = env.outcomes().levels[idx];
      pi_sum += pi;
      if (trace) trace->log_round(static_cast<int>(i), repr, pi - row.beta * pi);
    }
    row.g_hat.assign(m, 0.0);
    std::size_t tail = 0;
    for (std::size_t j = m; j-- > 0;) {
      tail += hits[j];
      row.g_hat[j] =
          static_cast<double>(tail) / static_cast<double>(n_samples);
    }
    row.r_hat = pi_sum / static_cast<double>(n_samples);
  }
  return table;
}

void cost_bounds(EstimationTable& table, double eps) {
  double lcb = 0.0, ucb = 0.0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (i > 0) {
      double dr = table.rows[i].r_hat - table.rows[i - 1].r_hat;
      lcb += table.rows[i - 1].beta * dr;
      ucb += table.rows[i].beta * dr;
    }
    table.rows[i].c_lcb = lcb - 3.0 * eps;
    table.rows[i].c_ucb = ucb + 3.0 * eps;
  }
}

LinearProgram build_lp(std::size_t index, const EstimationTable& table,
                       double eps) {
  if (index >= table.rows.size())
    throw std::invalid_argument("learner: grid index out of range");
  std::size_t m = table.levels;
  const EstimationRow& target = table.rows[index];

  LinearProgram lp(m, LinearProgram::Sense::maximize);
  for (std::size_t j = 0; j < m; ++j) {
    double f_hat = target.g_hat[j] - (j + 1 < m ? target.g_hat[j + 1] : 0.0);
    lp.objective[j] = -f_hat;
    lp.lower[j] = 0.0;
    lp.upper[j] = 1.0;
  }
  for (std::size_t j = 1; j < m; ++j) {
    std::vector<double> coeffs(m, 0.0);
    coeffs[j] = 1.0;
    coeffs[j - 1] = -1.0;
    lp.add_constraint(std::move(coeffs),
                      LinearProgram::Relation::greater_equal, 0.0);
  }
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const EstimationRow& dev = table.rows[k];
    std::vector<double> coeffs(m);
    for (std::size_t j = 0; j < m; ++j) {
      double du_target =
          ccdf_ucb(target, j, m, eps) - ccdf_ucb(target, j + 1, m, eps);
      double du_dev = ccdf_lcb(dev, j, m, eps) - ccdf_lcb(dev, j + 1, m, eps);
      coeffs[j] = du_target - du_dev;
    }
    lp.add_constraint(std::move(coeffs),
                      LinearProgram::Relation::greater_equal,
                      target.c_lcb - dev.c_ucb - eps);
  }
  return lp;
}

FamilyResult solve_family(const EstimationTable& table, double eps) {
  FamilyResult best;
  best.feasible.assign(table.rows.size(), 0);
  bool any = false;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    LpSolution sol = solve_lp(build_lp(i, table, eps));
    if (sol.status == LpStatus::unbounded)
      throw std::runtime_error("learner: box-bounded program came back "
                               "unbounded");
    if (sol.status != LpStatus::optimal) continue;
    best.feasible[i] = 1;
    double apx = table.rows[i].r_hat + sol.value;
    if (!any || apx > best.apx) {
      any = true;
      best.index = i;
      best.apx = apx;
      best.contract.payments = sol.x;
    }
  }
  if (!any)
    throw std::runtime_error(
        "learner: every action-targeted program was infeasible");
  return best;
}

Contract ic_convert(const Contract& s, double delta,
                    const OutcomeGrid& outcomes) {
  if (!(delta >= 0.0) || delta > 1.0)
    throw std::domain_error("ic_convert: delta must lie in [0, 1]");
  if (s.payments.size() != outcomes.size())
    throw std::invalid_argument("ic_convert: contract/grid size mismatch");
  double root = std::sqrt(delta);
  Contract out;
  out.payments.resize(s.payments.size());
  for (std::size_t j = 0; j < s.payments.size(); ++j)
    out.payments[j] = (1.0 - root) * s.payments[j] + root * outcomes.levels[j];
  return out;
}

LearnResult learn_optimal_contract(const AgentType& env, double epsilon,
                                   double delta_conf, Rng& rng,
                                   RegretTrace* trace) {
  LearnResult res;
  res.config = LearnerConfig::from_env(env, epsilon, delta_conf);
  std::vector<LinearContract> grid = discretize_contracts(res.config);
  if (trace) {
    trace->set_metadata("algorithm", "repeated-query contract learner");
    trace->set_metadata("grid_size", std::to_string(grid.size()));
    trace->set_metadata("samples_per_arm",
                        std::to_string(res.config.samples_per_arm));
    trace->set_metadata("bounded_payment_cap", "1");
  }
  res.table = collect_and_estimate(env, grid, res.config.samples_per_arm, rng,
                                   trace);
  cost_bounds(res.table, epsilon);
  FamilyResult fam = solve_family(res.table, epsilon);
  res.chosen_index = fam.index;
  res.chosen_beta = res.table.rows[fam.index].beta;
  res.raw_contract = fam.contract;
  res.apx = fam.apx;
  res.conversion_delta = std::min(22.0 * epsilon, 1.0);
  double root = std::sqrt(res.conversion_delta);
  res.posted.payments =
      ic_convert(fam.contract, res.conversion_delta, env.outcomes());
  res.posted.recommended_index = fam.index;
  res.posted.ic_slack = 0.0;
  res.posted.utility_estimate =
      (1.0 - root) * fam.apx - (root - res.conversion_delta);
  res.total_samples = grid.size() * res.config.samples_per_arm;
  return res;
}

OracleResult oracle_opt(const AgentType& env, double fine_step) {
  double cap = env.effort_cap();
  if (!(fine_step > 0.0) || fine_step > cap)
    throw std::invalid_argument("oracle: step must lie in (0, E]");
  std::size_t count = nudged_floor_ratio(cap, fine_step) + 1;
  std::vector<double> actions(count);
  for (std::size_t t = 0; t < count; ++t)
    actions[t] = std::min(static_cast<double>(t) * fine_step, cap);
  if (actions.back() < cap - 1e-12) {
    actions.push_back(cap);
    ++count;
  }

  std::size_t m = env.level_count();
  std::vector<std::vector<double>> pmf_all(count);
  std::vector<double> c_all(count), r_all(count);
  for (std::size_t t = 0; t < count; ++t) {
    pmf_all[t] = env.pmf(actions[t]);
    c_all[t] = env.cost(actions[t]);
    r_all[t] = env.expected_reward(actions[t]);
  }

  OracleResult best;
  bool any = false;
  constexpr double kViolTol = 1e-9;
  for (std::size_t t = 0; t < count; ++t) {
    std::vector<std::size_t> active;
    auto add_active = [&](std::size_t k) {
      if (k == t || k >= count) return;
      if (std::find(active.begin(), active.end(), k) == active.end())
        active.push_back(k);
    };
    add_active(0);
    add_active(count - 1);
    if (t > 0) add_active(t - 1);
    add_active(t + 1);

    LpSolution sol;
    bool implementable = true;
    for (int iter = 0; iter < 500; ++iter) {
      LinearProgram lp(m, LinearProgram::Sense::minimize);
      for (std::size_t j = 0; j < m; ++j) {
        lp.objective[j] = pmf_all[t][j];
        lp.lower[j] = 0.0;
        lp.upper[j] = 1.0;
      }
      for (std::size_t j = 1; j < m; ++j) {
        std::vector<double> coeffs(m, 0.0);
        coeffs[j] = 1.0;
        coeffs[j - 1] = -1.0;
        lp.add_constraint(std::move(coeffs),
                          LinearProgram::Relation::greater_equal, 0.0);
      }
      for (std::size_t k : active) {
        std::vector<double> coeffs(m);
        for (std::size_t j = 0; j < m; ++j)
          coeffs[j] = pmf_all[t][j] - pmf_all[k][j];
        lp.add_constraint(std::move(coeffs),
                          LinearProgram::Relation::greater_equal,
                          c_all[t] - c_all[k]);
      }
      sol = solve_lp(lp);
      if (sol.status != LpStatus::optimal) {
        implementable = false;
        break;
      }
      double worst = kViolTol;
      std::size_t worst_k = t;
      for (std::size_t k = 0; k < count; ++k) {
        if (k == t) continue;
        double lhs = 0.0;
        for (std::size_t j = 0; j < m; ++j)
          lhs += sol.x[j] * (pmf_all[t][j] - pmf_all[k][j]);
        double viol = (c_all[t] - c_all[k]) - lhs;
        if (viol > worst) {
          worst = viol;
          worst_k = k;
        }
      }
      if (worst_k == t) break;  // all incentive rows hold
      if (std::find(active.begin(), active.end(), worst_k) != active.end())
        break;  // numerically stalled on an already-active row
      active.push_back(worst_k);
    }
    if (!implementable) continue;

    double value = r_all[t] - sol.value;
    if (!any || value > best.value) {
      any = true;
      best.value = value;
      best.contract.payments = sol.x;
      best.action = actions[t];
    }
  }
  if (!any)
    throw std::runtime_error("oracle: no implementable action found");
  return best;
}

}  // namespace pact
