#include "pact/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <utility>

#include "pact/numeric.hpp"

namespace pact {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config error at " + where + ": " + what);
}

const json& need(const json& doc, const std::string& where,
                 const char* field) {
  if (!doc.is_object()) fail(where, "expected an object");
  auto it = doc.find(field);
  if (it == doc.end()) fail(where + "." + field, "required field is missing");
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

double need_number(const json& doc, const std::string& where,
                   const char* field) {
  return as_number(need(doc, where, field), where + "." + field);
}

double opt_number(const json& doc, const std::string& where,
                  const char* field, double fallback) {
  if (!doc.is_object() || !doc.contains(field)) return fallback;
  return as_number(doc[field], where + "." + field);
}

std::size_t need_count(const json& doc, const std::string& where,
                       const char* field) {
  const json& v = need(doc, where, field);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    fail(where + "." + field, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::size_t opt_count(const json& doc, const std::string& where,
                      const char* field, std::size_t fallback) {
  if (!doc.is_object() || !doc.contains(field)) return fallback;
  const json& v = doc[field];
  if (!v.is_number_integer() || v.get<long long>() < 0)
    fail(where + "." + std::string(field), "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::string need_string(const json& doc, const std::string& where,
                        const char* field) {
  const json& v = need(doc, where, field);
  if (!v.is_string()) fail(where + "." + field, "expected a string");
  return v.get<std::string>();
}

std::string opt_string(const json& doc, const std::string& where,
                       const char* field, const std::string& fallback) {
  if (!doc.is_object() || !doc.contains(field)) return fallback;
  const json& v = doc[field];
  if (!v.is_string()) fail(where + "." + std::string(field), "expected a string");
  return v.get<std::string>();
}

bool opt_bool(const json& doc, const std::string& where, const char* field,
              bool fallback) {
  if (!doc.is_object() || !doc.contains(field)) return fallback;
  const json& v = doc[field];
  if (!v.is_boolean()) fail(where + "." + std::string(field), "expected a boolean");
  return v.get<bool>();
}

std::vector<double> number_array(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> need_numbers(const json& doc, const std::string& where,
                                 const char* field) {
  return number_array(need(doc, where, field), where + "." + field);
}

void reject_unknown(const json& doc, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!doc.is_object()) fail(where, "expected an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return it.key() == k; });
    if (!known) fail(where + "." + it.key(), "unknown field");
  }
}

}  // namespace

json to_json(const AgentType& type) {
  json tech;
  const ProductionTechnology& t = type.technology();
  switch (t.family) {
    case ProductionTechnology::Family::bernoulli_effort:
      tech = {{"family", "bernoulli-effort"}};
      break;
    case ProductionTechnology::Family::smooth_parametric:
      tech = {{"family", "smooth-parametric"}, {"exponents", t.exponents}};
      break;
    case ProductionTechnology::Family::tabulated:
      tech = {{"family", "tabulated"},
              {"knots", t.knots},
              {"ccdf", t.ccdf_table}};
      break;
  }

  json cost;
  const CostFunction& c = type.cost_function();
  switch (c.family) {
    case CostFunction::Family::quadratic:
      cost = {{"family", "quadratic"}, {"strength", c.strength}};
      break;
    case CostFunction::Family::power:
      cost = {{"family", "power"}, {"coeff", c.coeff},
              {"exponent", c.exponent}};
      break;
    case CostFunction::Family::tabulated:
      cost = {{"family", "tabulated"}, {"knots", c.knots},
              {"values", c.values}};
      break;
    case CostFunction::Family::custom:
      throw std::invalid_argument(
          "agent type: custom cost evaluators are not serializable");
  }

  return json{{"outcomes", type.outcomes().levels},
              {"technology", tech},
              {"cost", cost},
              {"effort_cap", type.effort_cap()},
              {"beta_max", type.beta_max()}};
}

AgentType agent_from_json(const json& doc, const std::string& where) {
  reject_unknown(doc, where,
                 {"outcomes", "technology", "cost", "effort_cap", "beta_max"});

  OutcomeGrid grid;
  grid.levels = need_numbers(doc, where, "outcomes");

  const json& tj = need(doc, where, "technology");
  const std::string tw = where + ".technology";
  ProductionTechnology tech;
  std::string tf = need_string(tj, tw, "family");
  if (tf == "bernoulli-effort") {
    reject_unknown(tj, tw, {"family"});
    tech.family = ProductionTechnology::Family::bernoulli_effort;
  } else if (tf == "smooth-parametric") {
    reject_unknown(tj, tw, {"family", "exponents"});
    tech.family = ProductionTechnology::Family::smooth_parametric;
    tech.exponents = need_numbers(tj, tw, "exponents");
  } else if (tf == "tabulated") {
    reject_unknown(tj, tw, {"family", "knots", "ccdf"});
    tech.family = ProductionTechnology::Family::tabulated;
    tech.knots = need_numbers(tj, tw, "knots");
    const json& rows = need(tj, tw, "ccdf");
    if (!rows.is_array()) fail(tw + ".ccdf", "expected an array of rows");
    for (std::size_t i = 0; i < rows.size(); ++i)
      tech.ccdf_table.push_back(number_array(
          rows[i], tw + ".ccdf[" + std::to_string(i) + "]"));
  } else {
    fail(tw + ".family", "unknown technology family '" + tf + "'");
  }

  const json& cj = need(doc, where, "cost");
  const std::string cw = where + ".cost";
  CostFunction cost;
  std::string cf = need_string(cj, cw, "family");
  if (cf == "quadratic") {
    reject_unknown(cj, cw, {"family", "strength"});
    cost = CostFunction::quadratic_cost(need_number(cj, cw, "strength"));
  } else if (cf == "power") {
    reject_unknown(cj, cw, {"family", "coeff", "exponent"});
    cost = CostFunction::power_cost(need_number(cj, cw, "coeff"),
                                    need_number(cj, cw, "exponent"));
  } else if (cf == "tabulated") {
    reject_unknown(cj, cw, {"family", "knots", "values"});
    cost = CostFunction::tabulated_cost(need_numbers(cj, cw, "knots"),
                                        need_numbers(cj, cw, "values"));
  } else {
    fail(cw + ".family", "unknown cost family '" + cf + "'");
  }

  double cap = need_number(doc, where, "effort_cap");
  double beta_max = need_number(doc, where, "beta_max");
  return AgentType(std::move(grid), std::move(tech), std::move(cost), cap,
                   beta_max);
}

json to_json(const TypeDistribution& dist) {
  json support = json::array();
  for (const AgentType& t : dist.support) support.push_back(to_json(t));
  return json{{"support", support}, {"weights", dist.weights}};
}

TypeDistribution distribution_from_json(const json& doc,
                                        const std::string& where) {
  reject_unknown(doc, where, {"support", "weights"});
  const json& sj = need(doc, where, "support");
  if (!sj.is_array() || sj.empty())
    fail(where + ".support", "expected a nonempty array of agent types");
  TypeDistribution dist;
  for (std::size_t i = 0; i < sj.size(); ++i)
    dist.support.push_back(agent_from_json(
        sj[i], where + ".support[" + std::to_string(i) + "]"));
  if (doc.contains("weights"))
    dist.weights = need_numbers(doc, where, "weights");
  else
    dist.weights.assign(dist.support.size(),
                        1.0 / static_cast<double>(dist.support.size()));
  dist.validate();
  return dist;
}

json to_json(const DemandCurve& demand) {
  switch (demand.family) {
    case DemandCurve::Family::linear:
      return json{{"family", "linear"}};
    case DemandCurve::Family::power:
      return json{{"family", "power"}, {"exponent", demand.exponent}};
    case DemandCurve::Family::tabulated:
      return json{{"family", "tabulated"},
                  {"prices", demand.prices},
                  {"quantities", demand.quantities}};
  }
  throw std::invalid_argument("demand curve: unknown family");
}

DemandCurve demand_from_json(const json& doc, const std::string& where) {
  std::string fam = need_string(doc, where, "family");
  if (fam == "linear") {
    reject_unknown(doc, where, {"family"});
    return DemandCurve::linear_demand();
  }
  if (fam == "power") {
    reject_unknown(doc, where, {"family", "exponent"});
    return DemandCurve::power_demand(need_number(doc, where, "exponent"));
  }
  if (fam == "tabulated") {
    reject_unknown(doc, where, {"family", "prices", "quantities"});
    return DemandCurve::tabulated_demand(need_numbers(doc, where, "prices"),
                                         need_numbers(doc, where, "quantities"));
  }
  fail(where + ".family", "unknown demand family '" + fam + "'");
}

json to_json(const TeamProduction& prod) {
  switch (prod.builtin) {
    case TeamProduction::Builtin::cobb_douglas:
      return json{{"family", "cobb-douglas"},
                  {"scale", prod.scale},
                  {"exponents", prod.exponents}};
    case TeamProduction::Builtin::ces:
      return json{{"family", "ces"},
                  {"weights", prod.weights},
                  {"k", prod.decay},
                  {"d", prod.returns}};
    case TeamProduction::Builtin::none:
      break;
  }
  throw std::invalid_argument(
      "team production: custom instances are not serializable");
}

TeamProduction team_from_json(const json& doc, const std::string& where) {
  std::string fam = need_string(doc, where, "family");
  if (fam == "cobb-douglas") {
    reject_unknown(doc, where, {"family", "scale", "exponents"});
    return TeamProduction::cobb_douglas(need_number(doc, where, "scale"),
                                        need_numbers(doc, where, "exponents"));
  }
  if (fam == "ces") {
    reject_unknown(doc, where, {"family", "weights", "k", "d"});
    return TeamProduction::ces(need_numbers(doc, where, "weights"),
                               need_number(doc, where, "k"),
                               need_number(doc, where, "d"));
  }
  fail(where + ".family", "unknown team production family '" + fam + "'");
}

json to_json(const LearnResult& result) {
  const LearnerConfig& c = result.config;
  json config{{"epsilon", c.epsilon},
              {"delta_conf", c.delta_conf},
              {"lambda", c.lambda},
              {"grad_bound", c.grad_bound},
              {"r_prime_0", c.r_prime_0},
              {"c_prime_cap", c.c_prime_cap},
              {"beta_max", c.beta_max},
              {"eps_c", c.eps_c},
              {"grid_size", c.grid_size},
              {"samples_per_arm", c.samples_per_arm}};

  json table = json::array();
  for (const EstimationRow& row : result.table.rows)
    table.push_back(json{{"beta", row.beta},
                         {"g_hat", row.g_hat},
                         {"r_hat", row.r_hat},
                         {"c_lcb", row.c_lcb},
                         {"c_ucb", row.c_ucb},
                         {"samples", row.samples}});

  return json{{"config", config},
              {"table", table},
              {"chosen_index", result.chosen_index},
              {"chosen_beta", result.chosen_beta},
              {"raw_contract", result.raw_contract.payments},
              {"apx", result.apx},
              {"conversion_delta", result.conversion_delta},
              {"posted",
               json{{"payments", result.posted.payments.payments},
                    {"recommended_index", result.posted.recommended_index},
                    {"ic_slack", result.posted.ic_slack},
                    {"utility_estimate", result.posted.utility_estimate}}},
              {"total_samples", result.total_samples}};
}

std::string estimation_table_csv(const EstimationTable& table) {
  std::string out = "beta,r_hat,c_lcb,c_ucb,samples";
  for (std::size_t j = 0; j < table.levels; ++j)
    out += ",g_hat_" + std::to_string(j);
  out += "\n";
  for (const EstimationRow& row : table.rows) {
    out += format_double(row.beta);
    out += ',';
    out += format_double(row.r_hat);
    out += ',';
    out += format_double(row.c_lcb);
    out += ',';
    out += format_double(row.c_ucb);
    out += ',';
    out += std::to_string(row.samples);
    for (double g : row.g_hat) {
      out += ',';
      out += format_double(g);
    }
    out += '\n';
  }
  return out;
}

namespace {

IdenticalParams identical_params(const json& params, const std::string& pw) {
  reject_unknown(params, pw, {"epsilon", "delta_conf"});
  IdenticalParams p;
  p.epsilon = opt_number(params, pw, "epsilon", p.epsilon);
  p.delta_conf = opt_number(params, pw, "delta_conf", p.delta_conf);
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0))
    fail(pw + ".epsilon", "must lie in (0, 1)");
  if (!(p.delta_conf > 0.0 && p.delta_conf < 1.0))
    fail(pw + ".delta_conf", "must lie in (0, 1)");
  return p;
}

HeteroParams hetero_params(const json& params, const std::string& pw,
                           bool adversarial, std::size_t support_size) {
  if (adversarial)
    reject_unknown(params, pw, {"horizon", "beta_cap", "grid_step", "space",
                                "levels", "sequence"});
  else
    reject_unknown(params, pw,
                   {"horizon", "beta_cap", "grid_step", "space", "levels"});
  HeteroParams p;
  p.horizon = need_count(params, pw, "horizon");
  if (p.horizon == 0) fail(pw + ".horizon", "must be at least 1");
  p.beta_cap = opt_number(params, pw, "beta_cap", p.beta_cap);
  if (!(p.beta_cap > 0.0)) fail(pw + ".beta_cap", "must be positive");
  p.grid_step = opt_number(params, pw, "grid_step", p.grid_step);
  if (!(p.grid_step > 0.0)) fail(pw + ".grid_step", "must be positive");
  p.space = opt_string(params, pw, "space", p.space);
  if (p.space != "linear" && p.space != "monotone")
    fail(pw + ".space", "must be 'linear' or 'monotone'");
  p.levels = opt_count(params, pw, "levels", p.levels);
  if (p.levels < 2) fail(pw + ".levels", "must be at least 2");
  if (adversarial) {
    const json& seq = need(params, pw, "sequence");
    if (!seq.is_array()) fail(pw + ".sequence", "expected an array of indices");
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const std::string sw = pw + ".sequence[" + std::to_string(i) + "]";
      if (!seq[i].is_number_integer() || seq[i].get<long long>() < 0)
        fail(sw, "expected a nonnegative integer");
      std::size_t idx = seq[i].get<std::size_t>();
      if (idx >= support_size) fail(sw, "type index is out of range");
      p.sequence.push_back(idx);
    }
    if (p.sequence.size() < p.horizon)
      fail(pw + ".sequence", "needs one arrival index per round");
  }
  return p;
}

StrategicParams strategic_params(const json& params, const std::string& pw) {
  reject_unknown(params, pw,
                 {"mechanism", "horizon", "gamma", "policy", "sigma",
                  "perturbation", "arms", "epsilon", "delta_conf",
                  "underperform_fraction", "underperform_shift"});
  StrategicParams p;
  p.mechanism = opt_string(params, pw, "mechanism", p.mechanism);
  if (p.mechanism != "delayed-elimination" && p.mechanism != "lp-commit")
    fail(pw + ".mechanism", "must be 'delayed-elimination' or 'lp-commit'");
  p.horizon = need_count(params, pw, "horizon");
  if (p.horizon == 0) fail(pw + ".horizon", "must be at least 1");
  p.gamma = opt_number(params, pw, "gamma", p.gamma);
  if (!(p.gamma > 0.0 && p.gamma < 1.0))
    fail(pw + ".gamma", "must lie in (0, 1)");
  p.policy = opt_string(params, pw, "policy", p.policy);
  if (p.policy != "truthful" && p.policy != "budgeted-adversary" &&
      p.policy != "underperform-then-exploit")
    fail(pw + ".policy",
         "must be 'truthful', 'budgeted-adversary', or "
         "'underperform-then-exploit'");
  p.sigma = opt_number(params, pw, "sigma", p.sigma);
  if (!(p.sigma >= 0.0)) fail(pw + ".sigma", "must be nonnegative");
  p.perturbation = opt_number(params, pw, "perturbation", p.perturbation);
  if (!(p.perturbation >= 0.0))
    fail(pw + ".perturbation", "must be nonnegative");
  if (params.contains("arms")) {
    p.arms = need_numbers(params, pw, "arms");
    if (p.arms.empty()) fail(pw + ".arms", "must not be empty when given");
    for (std::size_t i = 0; i < p.arms.size(); ++i)
      if (!(p.arms[i] >= 0.0 && p.arms[i] <= 1.0))
        fail(pw + ".arms[" + std::to_string(i) + "]",
             "slopes must lie in [0, 1]");
  }
  p.epsilon = opt_number(params, pw, "epsilon", p.epsilon);
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0))
    fail(pw + ".epsilon", "must lie in (0, 1)");
  p.delta_conf = opt_number(params, pw, "delta_conf", p.delta_conf);
  if (!(p.delta_conf > 0.0 && p.delta_conf < 1.0))
    fail(pw + ".delta_conf", "must lie in (0, 1)");
  p.underperform_fraction =
      opt_number(params, pw, "underperform_fraction", p.underperform_fraction);
  if (!(p.underperform_fraction >= 0.0 && p.underperform_fraction <= 1.0))
    fail(pw + ".underperform_fraction", "must lie in [0, 1]");
  p.underperform_shift =
      opt_number(params, pw, "underperform_shift", p.underperform_shift);
  if (!(p.underperform_shift >= 0.0))
    fail(pw + ".underperform_shift", "must be nonnegative");
  return p;
}

PricingParams pricing_params(const json& params, const std::string& pw) {
  reject_unknown(params, pw, {"points", "alpha", "mc_rounds"});
  PricingParams p;
  p.points = opt_count(params, pw, "points", p.points);
  if (p.points < 2) fail(pw + ".points", "must be at least 2");
  p.alpha = opt_number(params, pw, "alpha", p.alpha);
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0))
    fail(pw + ".alpha", "must lie in [0, 1]");
  p.mc_rounds = opt_count(params, pw, "mc_rounds", p.mc_rounds);
  if (p.mc_rounds == 0) fail(pw + ".mc_rounds", "must be at least 1");
  return p;
}

TeamParams team_params_block(const json& params, const std::string& pw) {
  reject_unknown(params, pw, {"eps"});
  TeamParams p;
  p.eps = opt_number(params, pw, "eps", p.eps);
  if (!(p.eps > 0.0)) fail(pw + ".eps", "must be positive");
  return p;
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) fail("$", "expected an object");
  reject_unknown(
      doc, "$",
      {"schema_version", "kind", "seeds", "oracle", "environment", "params"});

  Scenario sc;
  sc.raw = doc;

  const json& ver = need(doc, "$", "schema_version");
  if (!ver.is_number_integer() || ver.get<int>() != 1)
    fail("$.schema_version", "unsupported value; this build reads version 1");

  sc.kind = need_string(doc, "$", "kind");
  static const char* kinds[] = {"identical", "hetero-stochastic",
                                "hetero-adversarial", "strategic",
                                "pricing", "team"};
  if (std::none_of(std::begin(kinds), std::end(kinds),
                   [&](const char* k) { return sc.kind == k; }))
    throw std::invalid_argument("usage error: unknown scenario kind '" +
                                sc.kind + "'");

  const json& seeds = need(doc, "$", "seeds");
  if (!seeds.is_array() || seeds.empty())
    fail("$.seeds", "expected a nonempty array");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const std::string sw = "$.seeds[" + std::to_string(i) + "]";
    if (!seeds[i].is_number_integer() || seeds[i].get<long long>() < 0)
      fail(sw, "seeds must be nonnegative integers");
    sc.seeds.push_back(seeds[i].get<std::uint64_t>());
  }

  if (doc.contains("oracle")) {
    const json& oj = doc["oracle"];
    reject_unknown(oj, "$.oracle", {"enabled", "resolution"});
    sc.oracle.enabled = opt_bool(oj, "$.oracle", "enabled", false);
    sc.oracle.resolution =
        opt_number(oj, "$.oracle", "resolution", sc.oracle.resolution);
    if (!(sc.oracle.resolution > 0.0))
      fail("$.oracle.resolution", "must be positive");
  }

  const json& env = need(doc, "$", "environment");
  const json params = doc.contains("params") ? doc["params"] : json::object();
  const std::string ew = "$.environment";
  const std::string pw = "$.params";

  if (sc.kind == "identical") {
    reject_unknown(env, ew, {"agent"});
    sc.agent = agent_from_json(need(env, ew, "agent"), ew + ".agent");
    sc.identical = identical_params(params, pw);
  } else if (sc.kind == "hetero-stochastic" ||
             sc.kind == "hetero-adversarial") {
    reject_unknown(env, ew, {"types"});
    sc.types = distribution_from_json(need(env, ew, "types"), ew + ".types");
    sc.hetero = hetero_params(params, pw, sc.kind == "hetero-adversarial",
                              sc.types->support.size());
  } else if (sc.kind == "strategic") {
    reject_unknown(env, ew, {"agent"});
    sc.agent = agent_from_json(need(env, ew, "agent"), ew + ".agent");
    sc.strategic = strategic_params(params, pw);
  } else if (sc.kind == "pricing") {
    reject_unknown(env, ew, {"demand"});
    sc.demand = demand_from_json(need(env, ew, "demand"), ew + ".demand");
    sc.pricing = pricing_params(params, pw);
  } else {
    reject_unknown(env, ew, {"team"});
    sc.team = team_from_json(need(env, ew, "team"), ew + ".team");
    sc.team_params = team_params_block(params, pw);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  return scenario_from_json(load_json_file(path));
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config error: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config error: " + path + ": " + e.what());
  }
  return doc;
}

void validate_schema(const json& doc, const json& schema,
                     const std::string& where) {
  if (schema.is_boolean()) {
    if (!schema.get<bool>()) fail(where, "schema forbids this value");
    return;
  }
  if (!schema.is_object()) return;

  if (auto it = schema.find("const"); it != schema.end() && doc != *it)
    fail(where, "value must equal " + it->dump());
  if (auto it = schema.find("enum"); it != schema.end()) {
    bool ok = std::any_of(it->begin(), it->end(),
                          [&](const json& v) { return v == doc; });
    if (!ok) fail(where, "value is not one of " + it->dump());
  }
  if (auto it = schema.find("type"); it != schema.end()) {
    auto matches = [&](const json& t) {
      const std::string name = t.get<std::string>();
      if (name == "object") return doc.is_object();
      if (name == "array") return doc.is_array();
      if (name == "string") return doc.is_string();
      if (name == "number") return doc.is_number();
      if (name == "integer") return doc.is_number_integer();
      if (name == "boolean") return doc.is_boolean();
      if (name == "null") return doc.is_null();
      return false;
    };
    bool ok = it->is_array()
                  ? std::any_of(it->begin(), it->end(), matches)
                  : matches(*it);
    if (!ok) fail(where, "wrong type, wanted " + it->dump());
  }

  if (doc.is_object()) {
    if (auto it = schema.find("required"); it != schema.end())
      for (const json& f : *it)
        if (!doc.contains(f.get<std::string>()))
          fail(where + "." + f.get<std::string>(),
               "required field is missing");
    const json* props = nullptr;
    if (auto it = schema.find("properties"); it != schema.end()) props = &*it;
    bool allow_extra = true;
    if (auto it = schema.find("additionalProperties");
        it != schema.end() && it->is_boolean())
      allow_extra = it->get<bool>();
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (props != nullptr && props->contains(it.key()))
        validate_schema(it.value(), (*props)[it.key()],
                        where + "." + it.key());
      else if (!allow_extra)
        fail(where + "." + it.key(), "unknown field");
    }
  }

  if (doc.is_array()) {
    if (auto it = schema.find("minItems");
        it != schema.end() && doc.size() < it->get<std::size_t>())
      fail(where, "array needs at least " + it->dump() + " items");
    if (auto it = schema.find("maxItems");
        it != schema.end() && doc.size() > it->get<std::size_t>())
      fail(where, "array allows at most " + it->dump() + " items");
    if (auto it = schema.find("items"); it != schema.end())
      for (std::size_t i = 0; i < doc.size(); ++i)
        validate_schema(doc[i], *it, where + "[" + std::to_string(i) + "]");
  }

  if (doc.is_number()) {
    double v = doc.get<double>();
    if (auto it = schema.find("minimum");
        it != schema.end() && v < it->get<double>())
      fail(where, "value is below the minimum " + it->dump());
    if (auto it = schema.find("exclusiveMinimum");
        it != schema.end() && v <= it->get<double>())
      fail(where, "value must exceed " + it->dump());
    if (auto it = schema.find("maximum");
        it != schema.end() && v > it->get<double>())
      fail(where, "value is above the maximum " + it->dump());
    if (auto it = schema.find("exclusiveMaximum");
        it != schema.end() && v >= it->get<double>())
      fail(where, "value must stay below " + it->dump());
  }
}

}  // namespace pact
