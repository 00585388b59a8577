#include "pact/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pact/bandit.hpp"
#include "pact/learner.hpp"
#include "pact/numeric.hpp"
#include "pact/pricing.hpp"
#include "pact/rng.hpp"
#include "pact/strategic.hpp"
#include "pact/team.hpp"
#include "pact/trace.hpp"

namespace pact {

namespace {

using nlohmann::json;

// Sorted by name so aggregation and serialization share one reduction order.
using Metrics = std::map<std::string, double>;

struct SeedOutcome {
  std::uint64_t seed = 0;
  Metrics metrics;
  json extra = json::object();  // merged into the seed entry
  std::vector<std::pair<std::string, std::string>> artifacts;
};

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::string out(16, '0');
  const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

double metadata_number(const RegretTrace& trace, const std::string& key) {
  const std::string* v = trace.find_metadata(key);
  return v == nullptr ? 0.0 : std::stod(*v);
}

std::string seed_file(const std::string& stem, std::uint64_t seed) {
  return stem + "_seed" + std::to_string(seed) + ".csv";
}

SeedOutcome run_identical_seed(const Scenario& sc, std::uint64_t seed,
                               const OracleResult* oracle) {
  const IdenticalParams& p = *sc.identical;
  SeedOutcome out;
  out.seed = seed;
  Rng rng(seed);
  RegretTrace trace;
  if (oracle != nullptr) trace.benchmark_value = oracle->value;
  LearnResult res =
      learn_optimal_contract(*sc.agent, p.epsilon, p.delta_conf, rng, &trace);
  double action = best_response(*sc.agent, res.posted.payments);
  double posted_utility =
      principal_utility(*sc.agent, res.posted.payments, action);
  out.metrics["posted_utility"] = posted_utility;
  out.metrics["apx"] = res.apx;
  out.metrics["chosen_beta"] = res.chosen_beta;
  out.metrics["conversion_delta"] = res.conversion_delta;
  out.metrics["ic_slack"] = res.posted.ic_slack;
  out.metrics["total_samples"] = static_cast<double>(res.total_samples);
  if (oracle != nullptr)
    out.metrics["oracle_gap"] = oracle->value - posted_utility;
  out.extra["result"] = to_json(res);
  out.artifacts.emplace_back(seed_file("trace", seed), trace.to_csv());
  out.artifacts.emplace_back(seed_file("estimation", seed),
                             estimation_table_csv(res.table));
  return out;
}

ContractSpace hetero_space(const TypeDistribution& dist,
                           const HeteroParams& p) {
  if (p.space == "linear")
    return ContractSpace::linear(dist, p.beta_cap, p.grid_step);
  return ContractSpace::monotone(dist, p.levels, p.grid_step);
}

SeedOutcome run_hetero_seed(const Scenario& sc, std::uint64_t seed) {
  const HeteroParams& p = *sc.hetero;
  SeedOutcome out;
  out.seed = seed;
  Rng rng(seed);
  ContractSpace space = hetero_space(*sc.types, p);
  RegretTrace trace;
  if (sc.kind == "hetero-stochastic") {
    ArrivalProcess arrival = ArrivalProcess::stochastic(*sc.types);
    trace = run_zooming(arrival, space, p.horizon, rng);
  } else {
    ArrivalProcess arrival =
        ArrivalProcess::adversarial(sc.types->support, p.sequence);
    trace = run_adversarial_grid(arrival, space, p.horizon, rng);
  }
  double final_regret = trace.rows.empty() ? 0.0 : trace.rows.back().cum_regret;
  out.metrics["final_regret"] = final_regret;
  out.metrics["avg_regret"] = final_regret / static_cast<double>(p.horizon);
  out.metrics["benchmark"] = trace.benchmark_value;
  if (sc.oracle.enabled && sc.kind == "hetero-stochastic" &&
      p.space == "linear") {
    // Independent check of the runner's own benchmark: exact mixture utility
    // maximized over the slope interval at the oracle resolution.
    double best = expected_utility_oracle(*sc.types, LinearContract{p.beta_cap});
    for (double beta = 0.0; beta < p.beta_cap; beta += sc.oracle.resolution)
      best = std::max(best,
                      expected_utility_oracle(*sc.types, LinearContract{beta}));
    out.metrics["oracle_gap"] = best - trace.benchmark_value;
  }
  out.artifacts.emplace_back(seed_file("trace", seed), trace.to_csv());
  return out;
}

StrategicAgentModel::Policy parse_policy(const std::string& name) {
  if (name == "truthful") return StrategicAgentModel::Policy::truthful;
  if (name == "budgeted-adversary")
    return StrategicAgentModel::Policy::budgeted_adversary;
  return StrategicAgentModel::Policy::underperform_then_exploit;
}

SeedOutcome run_strategic_seed(const Scenario& sc, std::uint64_t seed) {
  const StrategicParams& p = *sc.strategic;
  SeedOutcome out;
  out.seed = seed;
  Rng rng(seed);
  StrategicAgentModel agent{*sc.agent, p.gamma, parse_policy(p.policy),
                            p.underperform_fraction, p.underperform_shift};
  RegretTrace trace;
  if (p.mechanism == "lp-commit") {
    trace = run_lp_commit(agent, p.epsilon, p.delta_conf, p.horizon, rng);
    out.metrics["posted_round"] = metadata_number(trace, "posted_round");
  } else {
    MechanismConfig cfg;
    if (p.arms.empty()) {
      cfg.arms = grid_arms(grid_for_continuous(p.horizon));
    } else {
      cfg.arms.reserve(p.arms.size());
      for (double b : p.arms) cfg.arms.push_back(LinearContract{b});
    }
    cfg.horizon = p.horizon;
    double lambda = validate_assumptions(*sc.agent).cost_curvature_min;
    cfg.delay = choose_delay(p.horizon, p.gamma, lambda);
    cfg.perturbation = p.perturbation;
    cfg.sigma = p.sigma;
    trace = run_delayed_elimination(cfg, agent, rng);
    out.metrics["active_final"] = metadata_number(trace, "active_final");
  }
  double final_regret = trace.rows.empty() ? 0.0 : trace.rows.back().cum_regret;
  out.metrics["final_regret"] = final_regret;
  out.metrics["avg_regret"] = final_regret / static_cast<double>(p.horizon);
  out.metrics["benchmark"] = trace.benchmark_value;
  out.metrics["D"] = metadata_number(trace, "D");
  out.artifacts.emplace_back(seed_file("trace", seed), trace.to_csv());
  return out;
}

struct PricingShared {
  double correspondence_gap = 0.0;
  double utility_identity_gap = 0.0;
  double exact_utility = 0.0;  // alpha * D(alpha)
  std::string csv;
  std::optional<AgentType> carrier;
};

PricingShared pricing_shared(const Scenario& sc) {
  const PricingParams& p = *sc.pricing;
  PricingShared sh;
  std::string csv =
      "alpha,demand,response,pricing_utility,contracting_utility\n";
  for (const CorrespondenceRow& row : correspondence_table(*sc.demand,
                                                           p.points)) {
    sh.correspondence_gap =
        std::max(sh.correspondence_gap, std::fabs(row.response - row.demand));
    sh.utility_identity_gap =
        std::max(sh.utility_identity_gap,
                 std::fabs(row.contracting_utility - row.pricing_utility));
    csv += format_double(row.alpha);
    csv += ',';
    csv += format_double(row.demand);
    csv += ',';
    csv += format_double(row.response);
    csv += ',';
    csv += format_double(row.pricing_utility);
    csv += ',';
    csv += format_double(row.contracting_utility);
    csv += '\n';
  }
  sh.csv = std::move(csv);
  sh.exact_utility = expected_pricing_utility(*sc.demand, p.alpha);
  sh.carrier = agent_from_demand(*sc.demand);
  return sh;
}

SeedOutcome run_pricing_seed(const Scenario& sc, std::uint64_t seed,
                             const PricingShared& sh) {
  const PricingParams& p = *sc.pricing;
  SeedOutcome out;
  out.seed = seed;
  Rng rng(seed);
  // Monte Carlo replay of the posted price through the contracting carrier:
  // sales happen with probability D(alpha), the seller keeps alpha per sale.
  double effort = sc.demand->value(p.alpha);
  const std::vector<double>& levels = sh.carrier->outcomes().levels;
  double sum = 0.0;
  for (std::size_t t = 0; t < p.mc_rounds; ++t)
    sum += p.alpha * levels[sample_outcome(*sh.carrier, effort, rng)];
  double mc_value = sum / static_cast<double>(p.mc_rounds);
  out.metrics["correspondence_gap"] = sh.correspondence_gap;
  out.metrics["utility_identity_gap"] = sh.utility_identity_gap;
  out.metrics["mc_value"] = mc_value;
  out.metrics["mc_error"] = std::fabs(mc_value - sh.exact_utility);
  out.artifacts.emplace_back(seed_file("correspondence", seed), sh.csv);
  return out;
}

// Best value of (1 - total shares) * production over the share simplex,
// scanned on a per-axis grid of the given step.
void simplex_scan(const TeamProduction& prod, double step, std::size_t pts,
                  std::size_t axis, std::vector<double>& point, double used,
                  double& best, std::vector<double>& best_shares) {
  if (axis == point.size()) {
    ContractProfile profile;
    profile.shares = point;
    double value = (1.0 - used) * production_of_contract(prod, profile);
    if (value > best) {
      best = value;
      best_shares = point;
    }
    return;
  }
  for (std::size_t i = 0; i < pts; ++i) {
    double b = std::min(1.0, static_cast<double>(i) * step);
    if (used + b > 1.0 + 1e-9) break;
    point[axis] = b;
    simplex_scan(prod, step, pts, axis + 1, point, used + b, best,
                 best_shares);
  }
}

double team_grid_best(const TeamProduction& prod, double step,
                      std::size_t pts, std::vector<double>* shares_out) {
  std::vector<double> point(prod.n, 0.0);
  std::vector<double> best_shares(prod.n, 0.0);
  double best = 0.0;
  simplex_scan(prod, step, pts, 0, point, 0.0, best, best_shares);
  if (shares_out != nullptr) *shares_out = best_shares;
  return best;
}

struct TeamShared {
  TeamSweepResult sweep;
  std::string csv;
  json profile;
  double grid_best = 0.0;
  bool have_grid = false;
};

TeamShared team_shared(const Scenario& sc) {
  TeamShared sh;
  sh.sweep = find_optimal_team_contract(*sc.team, sc.team_params->eps);
  std::string csv = "k,objective,utility,queries\n";
  for (const SweepRow& row : sh.sweep.rows) {
    csv += format_double(row.k);
    csv += ',';
    csv += format_double(row.objective);
    csv += ',';
    csv += format_double(row.utility);
    csv += ',';
    csv += std::to_string(row.queries);
    csv += '\n';
  }
  sh.csv = std::move(csv);
  sh.profile = json{{"shares", sh.sweep.contract.shares},
                    {"utility", sh.sweep.utility},
                    {"k_at_best", sh.sweep.k_at_best},
                    {"oracle_queries", sh.sweep.oracle_queries}};
  if (sc.oracle.enabled) {
    double step = sc.oracle.resolution;
    std::size_t pts = static_cast<std::size_t>(std::floor(1.0 / step)) + 1;
    sh.grid_best = team_grid_best(*sc.team, step, pts, nullptr);
    sh.have_grid = true;
  }
  return sh;
}

SeedOutcome run_team_seed(std::uint64_t seed, const TeamShared& sh) {
  SeedOutcome out;
  out.seed = seed;
  out.metrics["utility"] = sh.sweep.utility;
  out.metrics["k_at_best"] = sh.sweep.k_at_best;
  out.metrics["oracle_queries"] =
      static_cast<double>(sh.sweep.oracle_queries);
  if (sh.have_grid) out.metrics["oracle_gap"] = sh.grid_best - sh.sweep.utility;
  out.artifacts.emplace_back(seed_file("sweep", seed), sh.csv);
  return out;
}

}  // namespace

RunSummary run_scenario(const Scenario& sc, std::size_t jobs) {
  auto t0 = std::chrono::steady_clock::now();
  if (jobs == 0) jobs = 1;

  std::optional<OracleResult> oracle;
  std::optional<PricingShared> pricing_sh;
  std::optional<TeamShared> team_sh;
  if (sc.kind == "identical" && sc.oracle.enabled)
    oracle = oracle_opt(*sc.agent, sc.oracle.resolution);
  if (sc.kind == "pricing") pricing_sh = pricing_shared(sc);
  if (sc.kind == "team") team_sh = team_shared(sc);

  std::vector<SeedOutcome> outcomes(sc.seeds.size());
  auto run_one = [&](std::size_t i) {
    std::uint64_t seed = sc.seeds[i];
    if (sc.kind == "identical")
      outcomes[i] = run_identical_seed(sc, seed, oracle ? &*oracle : nullptr);
    else if (sc.kind == "hetero-stochastic" ||
             sc.kind == "hetero-adversarial")
      outcomes[i] = run_hetero_seed(sc, seed);
    else if (sc.kind == "strategic")
      outcomes[i] = run_strategic_seed(sc, seed);
    else if (sc.kind == "pricing")
      outcomes[i] = run_pricing_seed(sc, seed, *pricing_sh);
    else
      outcomes[i] = run_team_seed(seed, *team_sh);
  };

  if (jobs <= 1 || sc.seeds.size() <= 1) {
    for (std::size_t i = 0; i < sc.seeds.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::size_t workers = std::min(jobs, sc.seeds.size());
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      futures.push_back(std::async(std::launch::async, [&]() {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= sc.seeds.size()) return;
          run_one(i);
        }
      }));
    for (auto& f : futures) f.get();
  }

  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const SeedOutcome& a, const SeedOutcome& b) {
                     return a.seed < b.seed;
                   });

  json seed_entries = json::array();
  for (const SeedOutcome& o : outcomes) {
    json entry{{"seed", o.seed}, {"metrics", o.metrics}};
    for (auto it = o.extra.begin(); it != o.extra.end(); ++it)
      entry[it.key()] = it.value();
    seed_entries.push_back(std::move(entry));
  }

  json aggregate = json::object();
  if (!outcomes.empty()) {
    for (const auto& [name, unused] : outcomes.front().metrics) {
      (void)unused;
      bool everywhere = true;
      double sum = 0.0;
      for (const SeedOutcome& o : outcomes) {
        auto it = o.metrics.find(name);
        if (it == o.metrics.end()) {
          everywhere = false;
          break;
        }
        sum += it->second;
      }
      if (!everywhere) continue;
      double mean = sum / static_cast<double>(outcomes.size());
      double var = 0.0;
      for (const SeedOutcome& o : outcomes) {
        double d = o.metrics.at(name) - mean;
        var += d * d;
      }
      var /= static_cast<double>(outcomes.size());
      aggregate[name] = json{{"mean", mean}, {"std", std::sqrt(var)}};
    }
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  RunSummary run;
  run.document = json{{"schema_version", 1},
                      {"kind", sc.kind},
                      {"scenario_digest", fnv1a_hex(sc.raw.dump())},
                      {"config", sc.raw},
                      {"seeds", std::move(seed_entries)},
                      {"aggregate", std::move(aggregate)},
                      {"wall_clock_seconds", wall}};
  for (SeedOutcome& o : outcomes)
    for (auto& art : o.artifacts) run.artifacts.push_back(std::move(art));
  if (team_sh)
    run.artifacts.emplace_back("team_contract.json",
                               team_sh->profile.dump(2) + "\n");
  return run;
}

void write_run(const RunSummary& run, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (const auto& [name, body] : run.artifacts) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot write " + name + " under " + out_dir);
    out << body;
  }
  std::ofstream out(fs::path(out_dir) / "summary.json", std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write summary.json under " + out_dir);
  out << run.document.dump(2) << '\n';
}

nlohmann::json brute_opt(const Scenario& sc) {
  double res = sc.oracle.resolution;
  if (sc.kind == "identical") {
    std::size_t pts = static_cast<std::size_t>(
                          std::floor(sc.agent->effort_cap() / res)) +
                      1;
    if (pts < 10)
      throw std::invalid_argument(
          "config error at $.oracle.resolution: fewer than 10 grid points "
          "for brute-opt");
    OracleResult o = oracle_opt(*sc.agent, res);
    return json{{"kind", sc.kind},
                {"optimum", o.value},
                {"action", o.action},
                {"contract", o.contract.payments},
                {"grid_points", pts}};
  }
  if (sc.kind == "team") {
    std::size_t pts = static_cast<std::size_t>(std::floor(1.0 / res)) + 1;
    if (pts < 10)
      throw std::invalid_argument(
          "config error at $.oracle.resolution: fewer than 10 grid points "
          "for brute-opt");
    if (sc.team->n > 3)
      throw std::invalid_argument(
          "config error at $.environment.team: brute-opt scans at most 3 "
          "agents");
    std::vector<double> shares;
    double best = team_grid_best(*sc.team, res, pts, &shares);
    return json{{"kind", sc.kind},
                {"optimum", best},
                {"contract", shares},
                {"grid_points_per_axis", pts}};
  }
  throw std::invalid_argument(
      "config error: brute-opt supports only 'identical' and 'team' "
      "scenarios");
}

nlohmann::json builtin_listing() {
  return json{
      {"kinds",
       {"identical", "hetero-stochastic", "hetero-adversarial", "strategic",
        "pricing", "team"}},
      {"technology_families",
       {"bernoulli-effort", "smooth-parametric", "tabulated"}},
      {"cost_families", {"quadratic", "power", "tabulated"}},
      {"demand_families", {"linear", "power", "tabulated"}},
      {"team_families", {"cobb-douglas", "ces"}},
      {"mechanisms", {"delayed-elimination", "lp-commit"}},
      {"policies",
       {"truthful", "budgeted-adversary", "underperform-then-exploit"}},
      {"contract_spaces", {"linear", "monotone"}}};
}

}  // namespace pact
