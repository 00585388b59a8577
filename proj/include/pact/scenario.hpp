#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pact/json_io.hpp"

namespace pact {

// Output of one scenario run: the summary document plus every artifact body
// keyed by its relative filename. Artifact bodies are byte-stable across
// repeated runs of the same config and seeds; the summary carries wall-clock
// time and is not.
struct RunSummary {
  nlohmann::json document;
  std::vector<std::pair<std::string, std::string>> artifacts;
};

// Runs every seed of the scenario and assembles the summary: one entry per
// seed sorted by seed value, aggregate mean/std per metric computed from
// exactly those entries, the config echo, and a digest of the config. jobs
// caps the number of seeds run concurrently; each seed owns its generator, so
// artifacts do not depend on the schedule.
RunSummary run_scenario(const Scenario& scenario, std::size_t jobs = 1);

// Writes the artifacts and summary.json under out_dir (created if missing).
void write_run(const RunSummary& run, const std::string& out_dir);

// Exhaustive-search optimum for the kinds with a small certified search
// space: 'identical' scans the incentive-feasible grid at the oracle
// resolution, 'team' scans the share simplex (at most 3 agents). Fewer than
// 10 grid points per axis is a config error; other kinds are unsupported.
nlohmann::json brute_opt(const Scenario& scenario);

// Machine-readable inventory of the families and enums the config accepts.
nlohmann::json builtin_listing();

}  // namespace pact
