#include "pact/trace.hpp"

#include <stdexcept>

#include "pact/numeric.hpp"

namespace pact {
namespace {

// Minimal CSV quoting: wrap fields containing separators or quotes.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void RegretTrace::set_metadata(const std::string& key,
                               const std::string& value) {
  for (auto& kv : metadata) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

const std::string* RegretTrace::find_metadata(const std::string& key) const {
  for (const auto& kv : metadata) {
    if (kv.first == key) return &kv.second;
  }
  return nullptr;
}

std::size_t RegretTrace::add_extra_column(const std::string& name) {
  extra_names.push_back(name);
  extra_values.emplace_back();
  return extra_values.size() - 1;
}

double RegretTrace::log_round(int arm_id, std::string contract_repr,
                              double realized_utility) {
  double prev = rows.empty() ? 0.0 : rows.back().cum_regret;
  TraceRow row;
  row.round = rows.size();
  row.arm_id = arm_id;
  row.contract_repr = std::move(contract_repr);
  row.realized_utility = realized_utility;
  row.cum_regret = prev + (benchmark_value - realized_utility);
  rows.push_back(std::move(row));
  return rows.back().cum_regret;
}

std::string RegretTrace::to_csv() const {
  for (std::size_t e = 0; e < extra_values.size(); ++e) {
    if (extra_values[e].size() != rows.size())
      throw std::logic_error("trace: extra column '" + extra_names[e] +
                             "' length does not match row count");
  }
  std::string out = "round,arm_id,contract_repr,realized_utility,cum_regret";
  for (const auto& name : extra_names) {
    out += ',';
    out += csv_field(name);
  }
  out += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const TraceRow& row = rows[r];
    out += std::to_string(row.round);
    out += ',';
    out += std::to_string(row.arm_id);
    out += ',';
    out += csv_field(row.contract_repr);
    out += ',';
    out += format_double(row.realized_utility);
    out += ',';
    out += format_double(row.cum_regret);
    for (const auto& col : extra_values) {
      out += ',';
      out += format_double(col[r]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace pact
