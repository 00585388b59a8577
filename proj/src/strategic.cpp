#include "pact/strategic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pact/learner.hpp"
#include "pact/numeric.hpp"

namespace pact {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string repr_linear(double beta) { return "beta=" + format_double(beta); }

std::string repr_payments(const std::vector<double>& s) {
  std::string out = "s=";
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j) out += ';';
    out += format_double(s[j]);
  }
  return out;
}

const char* policy_name(StrategicAgentModel::Policy p) {
  switch (p) {
    case StrategicAgentModel::Policy::truthful:
      return "truthful";
    case StrategicAgentModel::Policy::budgeted_adversary:
      return "budgeted-adversary";
    default:
      return "underperform-then-exploit";
  }
}

void validate_agent(const StrategicAgentModel& agent) {
  if (!(agent.gamma > 0.0) || agent.gamma >= 1.0)
    throw std::invalid_argument(
        "strategic agent: discount must lie in (0, 1)");
  if (agent.policy == StrategicAgentModel::Policy::underperform_then_exploit &&
      (!(agent.underperform_fraction >= 0.0) ||
       agent.underperform_fraction > 1.0 || agent.underperform_shift < 0.0))
    throw std::invalid_argument("strategic agent: bad underperform phase");
}

}  // namespace

void ArmState::refresh(std::size_t cutoff) {
  while (cursor_ < samples.size() && samples[cursor_].first < cutoff) {
    sum_delayed_ += samples[cursor_].second;
    ++n_delayed_;
    ++cursor_;
  }
}

double ArmState::mean() const {
  return n_delayed_ ? sum_delayed_ / static_cast<double>(n_delayed_) : 0.0;
}

double ArmState::ucb(double conf_num, double perturbation) const {
  if (n_delayed_ == 0) return kInf;
  return mean() + std::sqrt(conf_num / static_cast<double>(n_delayed_)) +
         perturbation;
}

double ArmState::lcb(double conf_num, double perturbation) const {
  if (n_delayed_ == 0) return -kInf;
  return mean() - std::sqrt(conf_num / static_cast<double>(n_delayed_)) -
         perturbation;
}

std::size_t choose_delay(std::size_t horizon, double gamma, double lambda) {
  if (!(gamma > 0.0) || gamma >= 1.0)
    throw std::domain_error("choose_delay: discount must lie in (0, 1)");
  if (!(lambda > 0.0))
    throw std::domain_error("choose_delay: needs strongly convex cost");
  if (horizon < 1) throw std::domain_error("choose_delay: empty horizon");
  double t = static_cast<double>(horizon);
  double arg = t * t * discounted_horizon(horizon, gamma) / lambda;
  if (arg <= 1.0) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(arg) / std::log(1.0 / gamma)));
}

double discounted_horizon(std::size_t horizon, double gamma) {
  if (!(gamma > 0.0) || gamma >= 1.0)
    throw std::domain_error(
        "discounted_horizon: discount must lie in (0, 1)");
  double t = static_cast<double>(horizon);
  return gamma * (1.0 - std::pow(gamma, t)) / (1.0 - gamma);
}

double deviation_budget(const AgentType& type, std::size_t horizon,
                        double gamma, std::size_t delay) {
  double take = std::min(1.0, type.effort_cap());
  return take * std::pow(gamma, static_cast<double>(delay)) *
         discounted_horizon(horizon, gamma);
}

double strategic_response(const AgentType& type, double beta) {
  if (beta < 0.0) throw std::invalid_argument("strategic_response: beta < 0");
  const double cap = type.effort_cap();
  const CostFunction& c = type.cost_function();
  switch (c.family) {
    case CostFunction::Family::quadratic:
      return std::clamp(beta / c.strength, 0.0, cap);
    case CostFunction::Family::power: {
      double slope0 = c.coeff * c.exponent;
      if (c.exponent <= 1.0) return beta > slope0 ? cap : 0.0;
      double a = std::pow(beta / slope0, 1.0 / (c.exponent - 1.0));
      return std::clamp(a, 0.0, cap);
    }
    default:
      return golden_section_max(
          [&](double a) { return beta * a - type.cost(a); }, 0.0, cap, 1e-10,
          300);
  }
}

double deviation_cost(const AgentType& type, double beta, double a_played) {
  type.require_effort(a_played);
  double a_star = strategic_response(type, beta);
  double best = beta * a_star - type.cost(a_star);
  double got = beta * a_played - type.cost(a_played);
  return std::max(0.0, best - got);
}

std::size_t grid_for_continuous(std::size_t horizon) {
  if (horizon < 2)
    throw std::invalid_argument("grid_for_continuous: horizon must be >= 2");
  double t = static_cast<double>(horizon);
  auto k = static_cast<std::size_t>(std::ceil(std::pow(t * std::log(t), 0.25)));
  return std::max<std::size_t>(k, 2);
}

std::vector<LinearContract> grid_arms(std::size_t k) {
  if (k < 1) throw std::invalid_argument("grid_arms: need at least one arm");
  std::vector<LinearContract> arms;
  arms.reserve(k);
  for (std::size_t i = 1; i <= k; ++i)
    arms.push_back({static_cast<double>(i) / static_cast<double>(k)});
  return arms;
}

RegretTrace run_delayed_elimination(const MechanismConfig& cfg,
                                    const StrategicAgentModel& agent,
                                    Rng& rng) {
  if (cfg.arms.empty())
    throw std::invalid_argument("delayed elimination: no candidate arms");
  for (const auto& arm : cfg.arms)
    if (!(arm.beta >= 0.0) || arm.beta > 1.0)
      throw std::invalid_argument(
          "delayed elimination: slopes must lie in [0, 1]");
  if (cfg.horizon < 1)
    throw std::invalid_argument("delayed elimination: empty horizon");
  if (cfg.perturbation < 0.0 || cfg.sigma < 0.0 || !(cfg.log_conf_const > 0.0))
    throw std::invalid_argument("delayed elimination: bad index parameters");
  validate_agent(agent);

  const AgentType& type = agent.type;
  const double cap = type.effort_cap();
  const double lambda = validate_assumptions(type).cost_curvature_min;

  const std::size_t n_arms = cfg.arms.size();
  std::vector<ArmState> arms(n_arms);
  std::vector<double> response(n_arms), value(n_arms);
  double benchmark = -kInf;
  for (std::size_t i = 0; i < n_arms; ++i) {
    arms[i].id = i;
    arms[i].beta = cfg.arms[i].beta;
    response[i] = strategic_response(type, arms[i].beta);
    value[i] = (1.0 - arms[i].beta) * response[i];
    benchmark = std::max(benchmark, value[i]);
  }

  double dev_cap = 0.0;
  std::size_t favorite = 0;
  if (agent.policy == StrategicAgentModel::Policy::budgeted_adversary) {
    if (!(lambda > 0.0))
      throw std::invalid_argument(
          "delayed elimination: the budgeted adversary needs a strongly "
          "convex cost");
    dev_cap = std::sqrt(
        deviation_budget(type, cfg.horizon, agent.gamma, cfg.delay) / lambda);
    double best_agent = -kInf;
    for (std::size_t i = 0; i < n_arms; ++i) {
      double mine = arms[i].beta * response[i] - type.cost(response[i]);
      if (mine > best_agent) {
        best_agent = mine;
        favorite = i;
      }
    }
  }
  const std::size_t shade_rounds =
      agent.policy == StrategicAgentModel::Policy::underperform_then_exploit
          ? static_cast<std::size_t>(agent.underperform_fraction *
                                     static_cast<double>(cfg.horizon))
          : 0;

  const double conf_num =
      cfg.log_conf_const *
      std::log(static_cast<double>(std::max<std::size_t>(cfg.horizon, 2)));

  RegretTrace trace;
  trace.benchmark_value = benchmark;
  trace.set_metadata("algorithm", "delayed elimination");
  trace.set_metadata("policy", policy_name(agent.policy));
  trace.set_metadata("D", std::to_string(cfg.delay));
  trace.set_metadata("gamma", format_double(agent.gamma));
  trace.set_metadata("sigma", format_double(cfg.sigma));
  trace.set_metadata("perturbation", format_double(cfg.perturbation));
  trace.set_metadata("lambda", format_double(lambda));
  trace.set_metadata("benchmark_method",
                     "max truthful linear utility over the candidate arms");
  if (agent.policy == StrategicAgentModel::Policy::budgeted_adversary)
    trace.set_metadata("deviation_budget",
                       format_double(dev_cap * dev_cap * lambda));
  std::size_t col_delta = trace.add_extra_column("delta_t");
  std::size_t col_active = trace.add_extra_column("active_arm_count");
  std::size_t col_delay = trace.add_extra_column("D");
  std::size_t col_gamma = trace.add_extra_column("gamma");

  std::size_t t = 0;
  std::size_t active_count = n_arms;
  while (t < cfg.horizon) {
    bool complete = true;
    for (auto& arm : arms) {
      if (!arm.active) continue;
      if (t >= cfg.horizon) {
        complete = false;
        break;
      }
      double a_true = response[arm.id];
      double a_t = a_true;
      if (agent.policy == StrategicAgentModel::Policy::budgeted_adversary)
        a_t = arm.id == favorite ? std::min(a_true + dev_cap, cap)
                                 : std::max(a_true - dev_cap, 0.0);
      else if (agent.policy ==
                   StrategicAgentModel::Policy::underperform_then_exploit &&
               t < shade_rounds)
        a_t = std::clamp(a_true - agent.underperform_shift, 0.0, cap);

      double y = std::clamp(a_t + cfg.sigma * rng.normal(), 0.0, 1.0);
      double obs = (1.0 - arm.beta) * y;
      arm.samples.emplace_back(t + 1, obs);

      TraceRow row;
      row.round = t;
      row.arm_id = static_cast<int>(arm.id);
      row.contract_repr = repr_linear(arm.beta);
      row.realized_utility = obs;
      double prev = trace.rows.empty() ? 0.0 : trace.rows.back().cum_regret;
      row.cum_regret = prev + (benchmark - (1.0 - arm.beta) * a_t);
      trace.rows.push_back(std::move(row));
      trace.extra_values[col_delta].push_back(a_t - a_true);
      trace.extra_values[col_active].push_back(
          static_cast<double>(active_count));
      trace.extra_values[col_delay].push_back(
          static_cast<double>(cfg.delay));
      trace.extra_values[col_gamma].push_back(agent.gamma);
      ++t;
    }
    if (!complete) break;
    if (active_count <= 1) continue;

    // Indices see S = {1 <= tau < t+1-D}; one sweep's samples age together.
    std::size_t cutoff = t + 1 > cfg.delay ? t + 1 - cfg.delay : 0;
    double max_lcb = -kInf;
    for (auto& arm : arms) {
      if (!arm.active) continue;
      arm.refresh(cutoff);
      max_lcb = std::max(max_lcb, arm.lcb(conf_num, cfg.perturbation));
    }
    if (max_lcb == -kInf) continue;
    for (auto& arm : arms) {
      if (!arm.active) continue;
      if (arm.ucb(conf_num, cfg.perturbation) < max_lcb) {
        arm.active = false;
        --active_count;
      }
    }
  }

  std::string survivors;
  for (const auto& arm : arms) {
    if (!arm.active) continue;
    if (!survivors.empty()) survivors += ';';
    survivors += std::to_string(arm.id);
  }
  trace.set_metadata("surviving_arms", survivors);
  trace.set_metadata("active_final", std::to_string(active_count));
  return trace;
}

RegretTrace run_lp_commit(const StrategicAgentModel& agent, double epsilon,
                          double delta_conf, std::size_t horizon, Rng& rng) {
  const AgentType& type = agent.type;
  LearnerConfig lc = LearnerConfig::from_env(type, epsilon, delta_conf);
  validate_agent(agent);
  auto grid = discretize_contracts(lc);
  const std::size_t sampling = grid.size() * lc.samples_per_arm;
  const std::size_t delay = choose_delay(horizon, agent.gamma, lc.lambda);
  if (horizon < sampling + delay + 1)
    throw std::invalid_argument(
        "lp commit: horizon cannot fit sampling, the delay, and a posting "
        "round");

  const double cap = type.effort_cap();
  double dev_cap = 0.0;
  if (agent.policy == StrategicAgentModel::Policy::budgeted_adversary)
    dev_cap = std::sqrt(
        deviation_budget(type, horizon, agent.gamma, delay) / lc.lambda);
  const std::size_t shade_rounds =
      agent.policy == StrategicAgentModel::Policy::underperform_then_exploit
          ? static_cast<std::size_t>(agent.underperform_fraction *
                                     static_cast<double>(horizon))
          : 0;

  OracleResult oracle = oracle_opt(type, 1e-3);

  RegretTrace trace;
  trace.benchmark_value = oracle.value;
  trace.set_metadata("algorithm", "lp learner with delayed commitment");
  trace.set_metadata("policy", policy_name(agent.policy));
  trace.set_metadata("D", std::to_string(delay));
  trace.set_metadata("gamma", format_double(agent.gamma));
  trace.set_metadata("epsilon", format_double(epsilon));
  trace.set_metadata("grid_size", std::to_string(lc.grid_size));
  trace.set_metadata("samples_per_arm", std::to_string(lc.samples_per_arm));
  trace.set_metadata("sampling_rounds", std::to_string(sampling));
  trace.set_metadata("posted_round", std::to_string(sampling + delay));
  trace.set_metadata("benchmark_method",
                     "fine-grid payment-minimizing oracle");
  std::size_t col_delta = trace.add_extra_column("delta_t");
  std::size_t col_active = trace.add_extra_column("active_arm_count");
  std::size_t col_delay = trace.add_extra_column("D");
  std::size_t col_gamma = trace.add_extra_column("gamma");

  const auto& levels = type.outcomes().levels;
  const std::size_t m = levels.size();
  EstimationTable table;
  table.levels = m;
  table.rows.reserve(grid.size());

  auto log_row = [&](std::size_t t, int arm_id, const std::string& repr,
                     double realized, double ideal, double delta,
                     double remaining) {
    TraceRow row;
    row.round = t;
    row.arm_id = arm_id;
    row.contract_repr = repr;
    row.realized_utility = realized;
    double prev = trace.rows.empty() ? 0.0 : trace.rows.back().cum_regret;
    row.cum_regret = prev + (oracle.value - ideal);
    trace.rows.push_back(std::move(row));
    trace.extra_values[col_delta].push_back(delta);
    trace.extra_values[col_active].push_back(remaining);
    trace.extra_values[col_delay].push_back(static_cast<double>(delay));
    trace.extra_values[col_gamma].push_back(agent.gamma);
  };

  std::size_t t = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double beta = grid[i].beta;
    const double a_true = best_response_linear(type, grid[i]);
    const std::string repr = repr_linear(beta);
    std::vector<std::size_t> hist(m, 0);
    double value_sum = 0.0;
    for (std::size_t n = 0; n < lc.samples_per_arm; ++n) {
      double a_t = a_true;
      if (agent.policy == StrategicAgentModel::Policy::budgeted_adversary)
        a_t = std::max(a_true - dev_cap, 0.0);
      else if (agent.policy ==
                   StrategicAgentModel::Policy::underperform_then_exploit &&
               t < shade_rounds)
        a_t = std::clamp(a_true - agent.underperform_shift, 0.0, cap);
      std::size_t out = sample_outcome(type, a_t, rng);
      double v = levels[out];
      hist[out] += 1;
      value_sum += v;
      log_row(t, static_cast<int>(i), repr, v - beta * v,
              (1.0 - beta) * type.expected_reward(a_t), a_t - a_true,
              static_cast<double>(grid.size() - i));
      ++t;
    }
    EstimationRow row;
    row.beta = beta;
    row.samples = lc.samples_per_arm;
    row.r_hat = value_sum / static_cast<double>(lc.samples_per_arm);
    row.g_hat.assign(m, 0.0);
    row.g_hat[0] = 1.0;
    std::size_t above = 0;
    for (std::size_t j = m; j-- > 1;) {
      above += hist[j];
      row.g_hat[j] =
          static_cast<double>(above) / static_cast<double>(lc.samples_per_arm);
    }
    table.rows.push_back(std::move(row));
  }

  cost_bounds(table, epsilon);
  FamilyResult fam = solve_family(table, epsilon);
  double delta_eff = std::min(22.0 * epsilon, 1.0);
  Contract posted = ic_convert(fam.contract, delta_eff, type.outcomes());
  trace.set_metadata("conversion_delta", format_double(delta_eff));
  trace.set_metadata("posted_contract", repr_payments(posted.payments));

  // Waiting phase: the null contract, so manipulation during sampling can no
  // longer pay off once the posted contract goes live.
  Contract null_c{std::vector<double>(m, 0.0)};
  const std::string null_repr = repr_payments(null_c.payments);
  double a_null = best_response(type, null_c);
  double u_null = principal_utility(type, null_c, a_null);
  for (std::size_t k = 0; k < delay; ++k) {
    std::size_t out = sample_outcome(type, a_null, rng);
    log_row(t, -1, null_repr, levels[out], u_null, 0.0, 1.0);
    ++t;
  }

  const std::string post_repr = repr_payments(posted.payments);
  double a_post = best_response(type, posted);
  double u_post = principal_utility(type, posted, a_post);
  while (t < horizon) {
    std::size_t out = sample_outcome(type, a_post, rng);
    log_row(t, -2, post_repr, levels[out] - posted.payments[out], u_post, 0.0,
            1.0);
    ++t;
  }
  return trace;
}

}  // namespace pact
