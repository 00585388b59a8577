#include <cstddef>
#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "pact/scenario.hpp"

namespace {

nlohmann::json parse_seed_list(const std::string& csv) {
  nlohmann::json seeds = nlohmann::json::array();
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string token = csv.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (token.empty() || used != token.size() ||
        token.find('-') != std::string::npos)
      throw std::invalid_argument(
          "config error at --seeds: '" + token +
          "' is not a nonnegative integer");
    seeds.push_back(static_cast<std::uint64_t>(value));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return seeds;
}

pact::Scenario load_with_overrides(const std::string& config_path,
                                   const std::string& seeds_csv) {
  nlohmann::json doc = pact::load_json_file(config_path);
  if (!seeds_csv.empty() && doc.is_object())
    doc["seeds"] = parse_seed_list(seeds_csv);
  return pact::scenario_from_json(doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scenario harness for repeated contract design"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string seeds_csv;
  std::string schema_path;
  std::size_t jobs = 1;

  CLI::App* run =
      app.add_subcommand("run", "run a scenario and write its artifacts");
  run->add_option("--config", config_path, "scenario config JSON")->required();
  run->add_option("--out", out_dir, "output directory (default: out)");
  run->add_option("--seeds", seeds_csv, "comma-separated seed override");
  run->add_option("--jobs", jobs, "seeds run concurrently (default: 1)");

  CLI::App* brute = app.add_subcommand(
      "brute-opt", "exhaustive optimum for identical/team configs");
  brute->add_option("--config", config_path, "scenario config JSON")
      ->required();

  CLI::App* validate = app.add_subcommand(
      "validate-config", "parse a config and report the first violation");
  validate->add_option("--config", config_path, "scenario config JSON")
      ->required();
  validate->add_option("--schema", schema_path,
                       "also check the raw document against this schema file");

  app.add_subcommand("list-builtins",
                     "print the builtin families and enums as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      pact::Scenario sc = load_with_overrides(config_path, seeds_csv);
      pact::RunSummary summary = pact::run_scenario(sc, jobs);
      pact::write_run(summary, out_dir);
      std::cout << "wrote " << summary.artifacts.size()
                << " artifact(s) and summary.json to " << out_dir << "\n"
                << summary.document["aggregate"].dump(2) << "\n";
    } else if (brute->parsed()) {
      pact::Scenario sc = load_with_overrides(config_path, seeds_csv);
      std::cout << pact::brute_opt(sc).dump(2) << "\n";
    } else if (validate->parsed()) {
      nlohmann::json doc = pact::load_json_file(config_path);
      if (!schema_path.empty())
        pact::validate_schema(doc, pact::load_json_file(schema_path));
      pact::Scenario sc = pact::scenario_from_json(doc);
      std::cout << "ok: " << sc.kind << " scenario with " << sc.seeds.size()
                << " seed(s)\n";
    } else {
      std::cout << pact::builtin_listing().dump(2) << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
