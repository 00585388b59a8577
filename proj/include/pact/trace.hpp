#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace pact {

// One logged interaction round.
struct TraceRow {
  std::size_t round = 0;
  int arm_id = 0;
  std::string contract_repr;
  double realized_utility = 0.0;
  double cum_regret = 0.0;
};

// Round-by-round log of a contract experiment: realized principal utility per
// round plus cumulative pseudo-regret against benchmark_value. Extra named
// numeric columns (one vector per column, parallel to rows) carry
// algorithm-specific state.
struct RegretTrace {
  std::vector<TraceRow> rows;
  double benchmark_value = 0.0;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> extra_names;
  std::vector<std::vector<double>> extra_values;

  void set_metadata(const std::string& key, const std::string& value);
  const std::string* find_metadata(const std::string& key) const;

  // Registers a new extra column and returns its index into extra_values.
  std::size_t add_extra_column(const std::string& name);

  // Appends a row and updates cum_regret from the previous row and
  // benchmark_value; returns the new row's cumulative regret.
  double log_round(int arm_id, std::string contract_repr,
                   double realized_utility);

  // CSV with header round,arm_id,contract_repr,realized_utility,cum_regret
  // followed by any extra columns. Throws std::logic_error if an extra
  // column's length differs from rows.size().
  std::string to_csv() const;
};

}  // namespace pact
