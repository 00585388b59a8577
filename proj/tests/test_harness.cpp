#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "pact/scenario.hpp"

using json = nlohmann::json;
using namespace pact;

namespace {

json desk_agent_json(double strength = 2.0) {
  return json{{"outcomes", {0.0, 1.0}},
              {"technology", {{"family", "bernoulli-effort"}}},
              {"cost", {{"family", "quadratic"}, {"strength", strength}}},
              {"effort_cap", 1.0},
              {"beta_max", strength}};  // c'(E)/r'(E) with E = 1
}

json identical_config(double epsilon, const std::vector<std::uint64_t>& seeds,
                      bool oracle) {
  json doc{{"schema_version", 1},
           {"kind", "identical"},
           {"seeds", seeds},
           {"environment", {{"agent", desk_agent_json()}}},
           {"params", {{"epsilon", epsilon}, {"delta_conf", 0.05}}}};
  if (oracle) doc["oracle"] = {{"enabled", true}, {"resolution", 1e-3}};
  return doc;
}

json hetero_config(const std::string& kind, std::size_t horizon,
                   const std::vector<std::uint64_t>& seeds) {
  json doc{{"schema_version", 1},
           {"kind", kind},
           {"seeds", seeds},
           {"environment",
            {{"types",
              {{"support", {desk_agent_json(2.0), desk_agent_json(4.0)}},
               {"weights", {0.5, 0.5}}}}}},
           {"params",
            {{"horizon", horizon},
             {"beta_cap", 1.0},
             {"grid_step", 0.05},
             {"space", "linear"}}}};
  return doc;
}

json team_config(double eps, double resolution) {
  return json{{"schema_version", 1},
              {"kind", "team"},
              {"seeds", {1}},
              {"oracle", {{"enabled", true}, {"resolution", resolution}}},
              {"environment",
               {{"team",
                 {{"family", "cobb-douglas"},
                  {"scale", 3.0},
                  {"exponents", {1.0 / 3.0, 1.0 / 3.0}}}}}},
              {"params", {{"eps", eps}}}};
}

AgentType desk_type() {
  OutcomeGrid grid;
  grid.levels = {0.0, 1.0};
  ProductionTechnology tech;
  return AgentType(grid, tech, CostFunction::quadratic_cost(2.0), 1.0, 2.0);
}

std::string parse_error(json doc) {
  try {
    (void)scenario_from_json(doc);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

std::string schema_error(const json& doc, const json& schema) {
  try {
    validate_schema(doc, schema);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

json load_schema(const std::string& name) {
  return load_json_file(std::string(PACT_SOURCE_DIR) + "/schemas/" + name);
}

const std::string* find_artifact(const RunSummary& run,
                                 const std::string& name) {
  for (const auto& [file, body] : run.artifacts)
    if (file == name) return &body;
  return nullptr;
}

std::size_t count_rows(const std::string& csv) {
  std::size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  return lines == 0 ? 0 : lines - 1;  // minus the header
}

}  // namespace

TEST_CASE("built-in environments round-trip through json losslessly") {
  AgentType desk = desk_type();
  json j = to_json(desk);
  AgentType back = agent_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.ccdf(1, 0.37) == desk.ccdf(1, 0.37));
  CHECK(back.cost(0.4) == desk.cost(0.4));
  CHECK(back.beta_max() == desk.beta_max());

  OutcomeGrid grid3;
  grid3.levels = {0.0, 0.4, 1.0};
  ProductionTechnology smooth;
  smooth.family = ProductionTechnology::Family::smooth_parametric;
  smooth.exponents = {2.0, 1.5};
  AgentType para(grid3, smooth, CostFunction::power_cost(0.8, 2.5), 1.0, 1.0);
  json jp = to_json(para);
  AgentType para_back = agent_from_json(jp);
  CHECK(to_json(para_back) == jp);
  CHECK(para_back.ccdf(2, 0.3) == para.ccdf(2, 0.3));
  CHECK(para_back.expected_reward(0.6) == para.expected_reward(0.6));

  ProductionTechnology tab;
  tab.family = ProductionTechnology::Family::tabulated;
  tab.knots = {0.0, 0.25, 0.5, 0.75, 1.0};
  tab.ccdf_table = {{0.0, 0.3, 0.55, 0.8, 1.0}, {0.0, 0.1, 0.2, 0.45, 0.7}};
  CostFunction tab_cost = CostFunction::tabulated_cost(
      {0.0, 0.25, 0.5, 0.75, 1.0}, {0.0, 0.02, 0.1, 0.3, 0.7});
  AgentType tabbed(grid3, tab, tab_cost, 1.0, 2.5);
  json jt = to_json(tabbed);
  AgentType tab_back = agent_from_json(jt);
  CHECK(to_json(tab_back) == jt);
  CHECK(tab_back.ccdf(1, 0.6) == tabbed.ccdf(1, 0.6));
  CHECK(tab_back.cost(0.6) == tabbed.cost(0.6));

  CostFunction custom;
  custom.family = CostFunction::Family::custom;
  custom.fn = [](double a) { return a * a; };
  custom.fn_prime = [](double a) { return 2.0 * a; };
  custom.fn_second = [](double) { return 2.0; };
  custom.custom_curvature_min = 2.0;
  OutcomeGrid grid2;
  grid2.levels = {0.0, 1.0};
  AgentType custom_type(grid2, ProductionTechnology{}, custom, 1.0, 2.0);
  CHECK_THROWS_AS((void)to_json(custom_type), std::invalid_argument);

  json bad_tech = j;
  bad_tech["technology"]["family"] = "psychic";
  std::string msg;
  try {
    (void)agent_from_json(bad_tech);
  } catch (const std::invalid_argument& e) {
    msg = e.what();
  }
  CHECK(msg.find("$.technology.family") != std::string::npos);
}

TEST_CASE("distributions, demand curves, and team technologies round-trip") {
  TypeDistribution dist;
  dist.support.push_back(desk_type());
  OutcomeGrid grid;
  grid.levels = {0.0, 1.0};
  dist.support.emplace_back(grid, ProductionTechnology{},
                            CostFunction::quadratic_cost(4.0), 1.0, 4.0);
  dist.weights = {0.25, 0.75};
  json j = to_json(dist);
  TypeDistribution back = distribution_from_json(j);
  CHECK(to_json(back) == j);

  json no_weights = j;
  no_weights.erase("weights");
  TypeDistribution uniform = distribution_from_json(no_weights);
  CHECK(uniform.weights == std::vector<double>{0.5, 0.5});

  json bad_weights = j;
  bad_weights["weights"] = {0.9, 0.9};
  CHECK_THROWS_AS((void)distribution_from_json(bad_weights),
                  std::invalid_argument);

  for (const DemandCurve& d :
       {DemandCurve::linear_demand(), DemandCurve::power_demand(2.0),
        DemandCurve::tabulated_demand({0.0, 0.5, 1.0}, {1.0, 0.6, 0.0})}) {
    json dj = to_json(d);
    DemandCurve dback = demand_from_json(dj);
    CHECK(to_json(dback) == dj);
    CHECK(dback.value(0.37) == d.value(0.37));
  }

  TeamProduction cd = TeamProduction::cobb_douglas(3.0, {1.0 / 3.0, 1.0 / 3.0});
  json cj = to_json(cd);
  TeamProduction cd_back = team_from_json(cj);
  CHECK(to_json(cd_back) == cj);
  ContractProfile thirds;
  thirds.shares = {1.0 / 3.0, 1.0 / 3.0};
  CHECK(production_of_contract(cd_back, thirds) ==
        doctest::Approx(production_of_contract(cd, thirds)).epsilon(1e-12));

  TeamProduction ces = TeamProduction::ces({0.5, 0.5}, 1.0, 0.5);
  json ej = to_json(ces);
  CHECK(to_json(team_from_json(ej)) == ej);

  TeamProduction custom;
  custom.n = 1;
  custom.f = [](const std::vector<double>& a) { return a[0]; };
  CHECK_THROWS_AS((void)to_json(custom), std::invalid_argument);
}

TEST_CASE("scenario configs reject bad fields by name") {
  json good = identical_config(0.1, {1, 2}, true);
  Scenario sc = scenario_from_json(good);
  CHECK(sc.kind == "identical");
  CHECK(sc.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(sc.identical->epsilon == 0.1);
  CHECK(sc.oracle.enabled);
  CHECK(sc.agent.has_value());
  CHECK(sc.raw == good);

  auto contains = [](const std::string& msg, const char* needle) {
    return msg.find(needle) != std::string::npos;
  };

  json d = good;
  d.erase("schema_version");
  CHECK(contains(parse_error(d), "$.schema_version"));

  d = good;
  d["schema_version"] = 2;
  CHECK(contains(parse_error(d), "$.schema_version"));

  d = good;
  d["kind"] = "mystery";
  CHECK(parse_error(d).rfind("usage error", 0) == 0);

  d = good;
  d["seeds"] = json::array();
  CHECK(contains(parse_error(d), "$.seeds"));

  d = good;
  d["seeds"] = {-3};
  CHECK(contains(parse_error(d), "$.seeds[0]"));

  d = good;
  d["surprise"] = 1;
  CHECK(contains(parse_error(d), "$.surprise"));

  d = good;
  d["params"]["bogus"] = 1;
  CHECK(contains(parse_error(d), "$.params.bogus"));

  d = good;
  d["params"]["epsilon"] = 1.5;
  CHECK(contains(parse_error(d), "$.params.epsilon"));

  d = good;
  d["oracle"]["resolution"] = 0.0;
  CHECK(contains(parse_error(d), "$.oracle.resolution"));

  d = good;
  d["environment"] = json::object();
  CHECK(contains(parse_error(d), "$.environment.agent"));

  d = good;
  d["environment"]["agent"]["cost"]["family"] = "cubic";
  CHECK(contains(parse_error(d), "$.environment.agent.cost.family"));

  json het = hetero_config("hetero-adversarial", 5, {1});
  het["params"]["sequence"] = {0, 1, 0};
  CHECK(contains(parse_error(het), "$.params.sequence"));
  het["params"]["sequence"] = {0, 1, 5, 0, 1};
  CHECK(contains(parse_error(het), "$.params.sequence[2]"));
  het["params"]["sequence"] = {0, 1, 1, 0, 1};
  CHECK(parse_error(het).empty());

  json stoch = hetero_config("hetero-stochastic", 5, {1});
  stoch["params"]["sequence"] = {0, 1, 1, 0, 1};
  CHECK(contains(parse_error(stoch), "$.params.sequence"));
  stoch["params"].erase("sequence");
  stoch["params"]["space"] = "wavy";
  CHECK(contains(parse_error(stoch), "$.params.space"));

  json strat{{"schema_version", 1},
             {"kind", "strategic"},
             {"seeds", {1}},
             {"environment", {{"agent", desk_agent_json()}}},
             {"params", {{"horizon", 100}, {"policy", "sneaky"}}}};
  CHECK(contains(parse_error(strat), "$.params.policy"));
  strat["params"]["policy"] = "truthful";
  strat["params"]["gamma"] = 1.0;
  CHECK(contains(parse_error(strat), "$.params.gamma"));

  json pricing{{"schema_version", 1},
               {"kind", "pricing"},
               {"seeds", {1}},
               {"environment", {{"demand", {{"family", "linear"}}}}},
               {"params", {{"points", 1}}}};
  CHECK(contains(parse_error(pricing), "$.params.points"));

  json team = team_config(0.01, 0.02);
  team["params"]["eps"] = 0.0;
  CHECK(contains(parse_error(team), "$.params.eps"));
}

TEST_CASE("the shipped schemas validate emitted documents") {
  json scenario_schema = load_schema("scenario.schema.json");
  json good = identical_config(0.1, {1}, true);
  CHECK(schema_error(good, scenario_schema).empty());

  json d = good;
  d["surprise"] = true;
  CHECK(schema_error(d, scenario_schema).find("$.surprise") !=
        std::string::npos);
  d = good;
  d["kind"] = "mystery";
  CHECK(!schema_error(d, scenario_schema).empty());
  d = good;
  d["seeds"] = json::array();
  CHECK(schema_error(d, scenario_schema).find("$.seeds") != std::string::npos);

  Scenario sc = scenario_from_json(identical_config(0.35, {4}, false));
  RunSummary run = run_scenario(sc);
  json summary_schema = load_schema("summary.schema.json");
  CHECK(schema_error(run.document, summary_schema).empty());
  json tampered = run.document;
  tampered.erase("aggregate");
  CHECK(!schema_error(tampered, summary_schema).empty());

  json bounds{{"type", "number"}, {"minimum", 0.0}, {"maximum", 1.0}};
  CHECK(schema_error(json(0.5), bounds).empty());
  CHECK(!schema_error(json(-0.1), bounds).empty());
  CHECK(!schema_error(json(1.2), bounds).empty());
  json excl{{"type", "number"}, {"exclusiveMinimum", 0.0}};
  CHECK(!schema_error(json(0.0), excl).empty());
  CHECK(schema_error(json(0.01), excl).empty());
  json choice{{"enum", {1, 2, 3}}};
  CHECK(schema_error(json(2), choice).empty());
  CHECK(!schema_error(json(4), choice).empty());
  json arr{{"type", "array"},
           {"minItems", 2},
           {"maxItems", 3},
           {"items", {{"type", "integer"}}}};
  CHECK(schema_error(json{1, 2}, arr).empty());
  CHECK(!schema_error(json{1}, arr).empty());
  CHECK(!schema_error(json{1, 2, 3, 4}, arr).empty());
  CHECK(schema_error(json{1, "x"}, arr).find("[1]") != std::string::npos);
}

TEST_CASE("identical runs are reproducible with one trace per seed") {
  json cfg = identical_config(0.3, {5, 1, 3}, true);
  Scenario sc = scenario_from_json(cfg);
  RunSummary first = run_scenario(sc, 1);
  RunSummary second = run_scenario(sc, 3);

  const json& entries = first.document["seeds"];
  REQUIRE(entries.size() == 3);
  CHECK(entries[0]["seed"] == 1);
  CHECK(entries[1]["seed"] == 3);
  CHECK(entries[2]["seed"] == 5);

  for (std::uint64_t seed : {1, 3, 5}) {
    CHECK(find_artifact(first,
                        "trace_seed" + std::to_string(seed) + ".csv") !=
          nullptr);
    CHECK(find_artifact(first,
                        "estimation_seed" + std::to_string(seed) + ".csv") !=
          nullptr);
  }
  CHECK(first.artifacts.size() == 6);

  REQUIRE(second.artifacts.size() == first.artifacts.size());
  for (std::size_t i = 0; i < first.artifacts.size(); ++i) {
    CHECK(second.artifacts[i].first == first.artifacts[i].first);
    CHECK(second.artifacts[i].second == first.artifacts[i].second);
  }
  CHECK(second.document["seeds"] == first.document["seeds"]);
  CHECK(second.document["aggregate"] == first.document["aggregate"]);

  double sum = 0.0;
  for (const json& entry : entries) {
    CHECK(entry["metrics"].contains("oracle_gap"));
    CHECK(entry["result"]["config"]["epsilon"] == 0.3);
    sum += entry["metrics"]["posted_utility"].get<double>();
  }
  double mean = sum / 3.0;
  double var = 0.0;
  for (const json& entry : entries) {
    double dd = entry["metrics"]["posted_utility"].get<double>() - mean;
    var += dd * dd;
  }
  const json& agg = first.document["aggregate"]["posted_utility"];
  CHECK(agg["mean"].get<double>() == doctest::Approx(mean).epsilon(1e-12));
  CHECK(agg["std"].get<double>() ==
        doctest::Approx(std::sqrt(var / 3.0)).epsilon(1e-12));

  std::string digest = first.document["scenario_digest"].get<std::string>();
  CHECK(digest.size() == 16);
  CHECK(digest.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(second.document["scenario_digest"].get<std::string>() == digest);

  const std::string& trace = *find_artifact(first, "trace_seed1.csv");
  CHECK(trace.rfind("round,arm_id,contract_repr,realized_utility,cum_regret",
                    0) == 0);
  CHECK(count_rows(trace) ==
        entries[0]["metrics"]["total_samples"].get<std::size_t>());
  const std::string& est = *find_artifact(first, "estimation_seed1.csv");
  CHECK(est.rfind("beta,r_hat,c_lcb,c_ucb,samples,g_hat_0,g_hat_1", 0) == 0);
  CHECK(count_rows(est) ==
        entries[0]["result"]["config"]["grid_size"].get<std::size_t>());
}

TEST_CASE("every scenario kind produces its artifacts") {
  SUBCASE("hetero-stochastic") {
    json cfg = hetero_config("hetero-stochastic", 400, {2, 9});
    cfg["oracle"] = {{"enabled", true}, {"resolution", 0.01}};
    RunSummary run = run_scenario(scenario_from_json(cfg), 2);
    CHECK(find_artifact(run, "trace_seed2.csv") != nullptr);
    CHECK(find_artifact(run, "trace_seed9.csv") != nullptr);
    for (const json& entry : run.document["seeds"]) {
      const json& m = entry["metrics"];
      CHECK(m.contains("final_regret"));
      CHECK(m.contains("avg_regret"));
      CHECK(m["benchmark"].get<double>() > 0.0);
      double gap = m["oracle_gap"].get<double>();
      CHECK(gap >= -1e-9);
      CHECK(gap <= 0.1);
    }
  }

  SUBCASE("hetero-adversarial") {
    json cfg = hetero_config("hetero-adversarial", 40, {6});
    std::vector<int> seq;
    for (int i = 0; i < 40; ++i) seq.push_back(i % 2);
    cfg["params"]["sequence"] = seq;
    RunSummary run = run_scenario(scenario_from_json(cfg));
    CHECK(find_artifact(run, "trace_seed6.csv") != nullptr);
    const json& m = run.document["seeds"][0]["metrics"];
    CHECK(std::isfinite(m["final_regret"].get<double>()));
    CHECK(m["benchmark"].get<double>() > 0.0);
  }

  SUBCASE("strategic delayed elimination") {
    json cfg{{"schema_version", 1},
             {"kind", "strategic"},
             {"seeds", {1}},
             {"environment", {{"agent", desk_agent_json()}}},
             {"params",
              {{"mechanism", "delayed-elimination"},
               {"horizon", 600},
               {"gamma", 0.9},
               {"policy", "truthful"},
               {"sigma", 0.05},
               {"arms", {0.3, 0.6}}}}};
    RunSummary run = run_scenario(scenario_from_json(cfg));
    const json& m = run.document["seeds"][0]["metrics"];
    CHECK(m["D"].get<double>() > 0.0);
    CHECK(m["active_final"].get<double>() >= 1.0);
    CHECK(m["benchmark"].get<double>() == doctest::Approx(0.12).epsilon(1e-9));
    const std::string& trace = *find_artifact(run, "trace_seed1.csv");
    CHECK(trace.find(",delta_t,active_arm_count,D,gamma") !=
          std::string::npos);
  }

  SUBCASE("strategic lp commitment") {
    json cfg{{"schema_version", 1},
             {"kind", "strategic"},
             {"seeds", {7}},
             {"environment", {{"agent", desk_agent_json()}}},
             {"params",
              {{"mechanism", "lp-commit"},
               {"horizon", 2000},
               {"gamma", 0.9},
               {"policy", "truthful"},
               {"epsilon", 0.35},
               {"delta_conf", 0.05}}}};
    RunSummary run = run_scenario(scenario_from_json(cfg));
    const json& m = run.document["seeds"][0]["metrics"];
    CHECK(m["posted_round"].get<double>() > 0.0);
    CHECK(m["D"].get<double>() > 0.0);
    CHECK(find_artifact(run, "trace_seed7.csv") != nullptr);
  }

  SUBCASE("pricing") {
    json cfg{{"schema_version", 1},
             {"kind", "pricing"},
             {"seeds", {3, 4}},
             {"environment", {{"demand", {{"family", "linear"}}}}},
             {"params",
              {{"points", 21}, {"alpha", 0.5}, {"mc_rounds", 20000}}}};
    RunSummary run = run_scenario(scenario_from_json(cfg));
    const std::string* a3 = find_artifact(run, "correspondence_seed3.csv");
    const std::string* a4 = find_artifact(run, "correspondence_seed4.csv");
    REQUIRE(a3 != nullptr);
    REQUIRE(a4 != nullptr);
    CHECK(*a3 == *a4);
    CHECK(a3->rfind("alpha,demand,response,pricing_utility,contracting_utility",
                    0) == 0);
    CHECK(count_rows(*a3) == 21);
    for (const json& entry : run.document["seeds"]) {
      const json& m = entry["metrics"];
      CHECK(m["correspondence_gap"].get<double>() <= 1e-6);
      CHECK(m["utility_identity_gap"].get<double>() <= 1e-8);
      CHECK(m["mc_error"].get<double>() <= 0.02);
    }
  }

  SUBCASE("team") {
    json cfg = team_config(0.05, 0.05);
    RunSummary run = run_scenario(scenario_from_json(cfg));
    const std::string* sweep = find_artifact(run, "sweep_seed1.csv");
    REQUIRE(sweep != nullptr);
    CHECK(sweep->rfind("k,objective,utility,queries", 0) == 0);
    const std::string* profile = find_artifact(run, "team_contract.json");
    REQUIRE(profile != nullptr);
    json profile_doc = json::parse(*profile);
    CHECK(schema_error(profile_doc, load_schema("team_contract.schema.json"))
              .empty());
    const json& m = run.document["seeds"][0]["metrics"];
    CHECK(m["utility"].get<double>() ==
          doctest::Approx(1.0 / 9.0).epsilon(0.5));
    CHECK(std::fabs(m["oracle_gap"].get<double>()) <= 0.06);
    CHECK(m["oracle_queries"].get<double>() > 0.0);
  }
}

TEST_CASE("brute-opt matches enumeration oracles and guards its grid") {
  json cfg = identical_config(0.1, {1}, true);
  json opt = brute_opt(scenario_from_json(cfg));
  CHECK(opt["optimum"].get<double>() ==
        doctest::Approx(0.12525).epsilon(1e-9));
  CHECK(opt["grid_points"].get<std::size_t>() == 1001);

  json half = cfg;
  half["oracle"]["resolution"] = 5e-4;
  json opt_half = brute_opt(scenario_from_json(half));
  CHECK(std::fabs(opt_half["optimum"].get<double>() -
                  opt["optimum"].get<double>()) <= 1e-3);

  json coarse = cfg;
  coarse["oracle"]["resolution"] = 0.2;
  CHECK_THROWS_AS((void)brute_opt(scenario_from_json(coarse)),
                  std::invalid_argument);

  json team = team_config(0.01, 0.02);
  json topt = brute_opt(scenario_from_json(team));
  double tvalue = topt["optimum"].get<double>();
  CHECK(tvalue >= 1.0 / 9.0 - 5e-3);
  CHECK(tvalue <= 1.0 / 9.0 + 1e-6);
  const json& shares = topt["contract"];
  REQUIRE(shares.size() == 2);
  CHECK(shares[0].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(0.2));
  CHECK(shares[1].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(0.2));

  json team_coarse = team_config(0.01, 0.2);
  CHECK_THROWS_AS((void)brute_opt(scenario_from_json(team_coarse)),
                  std::invalid_argument);

  json null_cfg = load_json_file(std::string(PACT_SOURCE_DIR) +
                                 "/configs/null_environment.json");
  json nopt = brute_opt(scenario_from_json(null_cfg));
  CHECK(nopt["optimum"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));

  json pricing{{"schema_version", 1},
               {"kind", "pricing"},
               {"seeds", {1}},
               {"environment", {{"demand", {{"family", "linear"}}}}}};
  std::string msg;
  try {
    (void)brute_opt(scenario_from_json(pricing));
  } catch (const std::invalid_argument& e) {
    msg = e.what();
  }
  CHECK(msg.find("brute-opt supports") != std::string::npos);
}

TEST_CASE("the command line maps errors to exit codes") {
  namespace fs = std::filesystem;
  fs::path tmp = fs::temp_directory_path() / "pact_cli_test";
  fs::create_directories(tmp);
  const std::string src(PACT_SOURCE_DIR);

  auto sh = [&](const std::string& args) {
    std::string cmd = std::string(PACT_CLI_PATH) + " " + args + " > " +
                      (tmp / "stdout.txt").string() + " 2> " +
                      (tmp / "stderr.txt").string();
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
  };

  CHECK(sh("list-builtins") == 0);

  for (const char* name :
       {"identical_bernoulli.json", "hetero_stochastic.json",
        "hetero_adversarial.json", "strategic_delayed_elimination.json",
        "strategic_lp_commit.json", "pricing_linear.json",
        "team_cobb_douglas.json", "null_environment.json"}) {
    CAPTURE(name);
    CHECK(sh("validate-config --config " + src + "/configs/" + name) == 0);
  }
  CHECK(sh("validate-config --config " + src +
           "/configs/identical_bernoulli.json --schema " + src +
           "/schemas/scenario.schema.json") == 0);

  std::ofstream bad(tmp / "bad_kind.json");
  bad << R"({"schema_version":1,"kind":"mystery","seeds":[1],)"
      << R"("environment":{}})";
  bad.close();
  CHECK(sh("validate-config --config " + (tmp / "bad_kind.json").string()) ==
        2);
  CHECK(sh("run --config " + (tmp / "bad_kind.json").string()) == 2);
  CHECK(sh("brute-opt --config " + src + "/configs/pricing_linear.json") == 2);
  CHECK(sh("run --config " + src +
           "/configs/pricing_linear.json --seeds 1,nope") == 2);

  // Valid config whose mechanism needs curved costs: fails at runtime, not
  // at parse time.
  json flat{{"schema_version", 1},
            {"kind", "strategic"},
            {"seeds", {1}},
            {"environment", {{"agent", desk_agent_json()}}},
            {"params",
             {{"mechanism", "delayed-elimination"}, {"horizon", 100}}}};
  flat["environment"]["agent"]["cost"] = {
      {"family", "power"}, {"coeff", 1.0}, {"exponent", 3.0}};
  flat["environment"]["agent"]["beta_max"] = 3.0;  // covers c'(E)/r'(E)
  std::ofstream flat_file(tmp / "flat_cost.json");
  flat_file << flat.dump();
  flat_file.close();
  CHECK(sh("validate-config --config " + (tmp / "flat_cost.json").string()) ==
        0);
  CHECK(sh("run --config " + (tmp / "flat_cost.json").string() + " --out " +
           (tmp / "flat_out").string()) == 1);

  fs::remove_all(tmp / "pricing_out");
  CHECK(sh("run --config " + src +
           "/configs/pricing_linear.json --out " +
           (tmp / "pricing_out").string() + " --seeds 3 --jobs 2") == 0);
  CHECK(fs::exists(tmp / "pricing_out" / "summary.json"));
  CHECK(fs::exists(tmp / "pricing_out" / "correspondence_seed3.csv"));
  json summary =
      load_json_file((tmp / "pricing_out" / "summary.json").string());
  CHECK(schema_error(summary, load_schema("summary.schema.json")).empty());
  REQUIRE(summary["seeds"].size() == 1);
  CHECK(summary["seeds"][0]["seed"] == 3);
}
