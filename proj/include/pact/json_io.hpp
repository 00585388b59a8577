#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pact/bandit.hpp"
#include "pact/env.hpp"
#include "pact/learner.hpp"
#include "pact/pricing.hpp"
#include "pact/team.hpp"

namespace pact {

// Environment documents. Round trips are lossless for the built-in families;
// custom evaluator bundles are rejected with std::invalid_argument. Parsers
// throw std::invalid_argument naming the offending field.
nlohmann::json to_json(const AgentType& type);
AgentType agent_from_json(const nlohmann::json& doc,
                          const std::string& where = "$");

nlohmann::json to_json(const TypeDistribution& dist);
TypeDistribution distribution_from_json(const nlohmann::json& doc,
                                        const std::string& where = "$");

nlohmann::json to_json(const DemandCurve& demand);
DemandCurve demand_from_json(const nlohmann::json& doc,
                             const std::string& where = "$");

nlohmann::json to_json(const TeamProduction& prod);
TeamProduction team_from_json(const nlohmann::json& doc,
                              const std::string& where = "$");

// Learner result document: config echo, per-slope estimation table, chosen
// index, raw and converted contracts, and the sample count.
nlohmann::json to_json(const LearnResult& result);

// Estimation table as CSV: beta, r_hat, c_lcb, c_ucb, samples, then one
// ccdf column per outcome level.
std::string estimation_table_csv(const EstimationTable& table);

struct OracleSettings {
  bool enabled = false;
  double resolution = 1e-3;
};

struct IdenticalParams {
  double epsilon = 0.1;
  double delta_conf = 0.05;
};

struct HeteroParams {
  std::size_t horizon = 0;
  double beta_cap = 1.0;
  double grid_step = 0.05;
  std::string space = "linear";  // or "monotone"
  std::size_t levels = 2;
  std::vector<std::size_t> sequence;  // adversarial arrivals, one per round
};

struct StrategicParams {
  std::string mechanism = "delayed-elimination";  // or "lp-commit"
  std::size_t horizon = 0;
  double gamma = 0.9;
  std::string policy = "truthful";
  double sigma = 0.1;
  double perturbation = 0.0;
  std::vector<double> arms;  // empty: sized from the horizon
  double epsilon = 0.1;      // lp-commit
  double delta_conf = 0.05;  // lp-commit
  double underperform_fraction = 0.1;
  double underperform_shift = 0.1;
};

struct PricingParams {
  std::size_t points = 101;
  double alpha = 0.5;  // posted price for the Monte Carlo utility check
  std::size_t mc_rounds = 100000;
};

struct TeamParams {
  double eps = 0.01;
};

// A validated experiment configuration. Exactly one environment and one
// parameter block is populated, matching the kind.
struct Scenario {
  int schema_version = 1;
  std::string kind;
  std::vector<std::uint64_t> seeds;
  OracleSettings oracle;
  nlohmann::json raw;  // canonical echo of the source document

  std::optional<AgentType> agent;         // identical, strategic
  std::optional<TypeDistribution> types;  // hetero-*
  std::optional<DemandCurve> demand;      // pricing
  std::optional<TeamProduction> team;     // team

  std::optional<IdenticalParams> identical;
  std::optional<HeteroParams> hetero;
  std::optional<StrategicParams> strategic;
  std::optional<PricingParams> pricing;
  std::optional<TeamParams> team_params;
};

// Parses and fully validates a config document; errors are
// std::invalid_argument prefixed "config error" (schema violations, named
// field) or "usage error" (unknown kind).
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

// Reads and parses a JSON file; parse failures and missing files raise
// std::invalid_argument naming the path.
nlohmann::json load_json_file(const std::string& path);

// Structural validation against the JSON-schema subset used by the shipped
// schema files: type, enum, const, required, properties,
// additionalProperties, items, minItems, maxItems, minimum, maximum,
// exclusiveMinimum, exclusiveMaximum. Throws std::invalid_argument with the
// document path of the first violation.
void validate_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                     const std::string& where = "$");

}  // namespace pact
