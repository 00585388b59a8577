#include "pact/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace pact {

namespace {

constexpr int kProbePoints = 101;   // strict-decrease probe for demand_to_cost
constexpr int kFloorPoints = 1001;  // curvature-floor sweep of the built cost

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void require_unit(double v, const char* msg) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error(msg);
}

}  // namespace

DemandCurve DemandCurve::linear_demand() { return DemandCurve{}; }

DemandCurve DemandCurve::power_demand(double exponent) {
  require(exponent > 0.0 && std::isfinite(exponent),
          "DemandCurve: power exponent must be positive");
  DemandCurve d;
  d.family = Family::power;
  d.exponent = exponent;
  return d;
}

DemandCurve DemandCurve::tabulated_demand(std::vector<double> prices,
                                          std::vector<double> quantities) {
  require(prices.size() == quantities.size() && prices.size() >= 2,
          "DemandCurve: tabulated needs matching knots, >= 2 points");
  require(prices.front() == 0.0 && prices.back() == 1.0,
          "DemandCurve: tabulated prices must span [0, 1]");
  for (std::size_t i = 0; i + 1 < prices.size(); ++i)
    require(prices[i] < prices[i + 1],
            "DemandCurve: tabulated prices must increase");
  for (double q : quantities)
    require(q >= 0.0 && q <= 1.0,
            "DemandCurve: tabulated quantities must lie in [0, 1]");
  for (std::size_t i = 0; i + 1 < quantities.size(); ++i)
    if (!(quantities[i + 1] < quantities[i]))
      throw std::domain_error("demand curve is not strictly decreasing");

  DemandCurve d;
  d.family = Family::tabulated;
  d.spline = MonotoneCubic(prices, quantities);
  d.prices = std::move(prices);
  d.quantities = std::move(quantities);
  return d;
}

double DemandCurve::value(double p) const {
  require_unit(p, "price outside [0, 1]");
  switch (family) {
    case Family::linear:
      return 1.0 - p;
    case Family::power:
      return std::pow(1.0 - p, exponent);
    case Family::tabulated:
      return spline.value(p);
  }
  return 0.0;
}

double DemandCurve::inverse(double q) const {
  require_unit(q, "demand level outside [0, 1]");
  switch (family) {
    case Family::linear:
      return 1.0 - q;
    case Family::power:
      return 1.0 - std::pow(q, 1.0 / exponent);
    case Family::tabulated: {
      if (q >= quantities.front()) return prices.front();
      if (q <= quantities.back()) return prices.back();
      return bisect_root([&](double p) { return spline.value(p) - q; }, 0.0,
                         1.0, 1e-12);
    }
  }
  return 0.0;
}

double DemandCurve::slope(double p) const {
  require_unit(p, "price outside [0, 1]");
  switch (family) {
    case Family::linear:
      return -1.0;
    case Family::power:
      if (exponent == 1.0) return -1.0;
      return -exponent * std::pow(1.0 - p, exponent - 1.0);
    case Family::tabulated:
      return spline.deriv(p);
  }
  return 0.0;
}

CostFunction demand_to_cost(const DemandCurve& demand) {
  // The construction needs a well-defined inverse on [0, 1].
  double prev = demand.value(0.0);
  require_unit(prev, "demand value outside [0, 1]");
  for (int i = 1; i < kProbePoints; ++i) {
    double cur = demand.value(static_cast<double>(i) / (kProbePoints - 1));
    require_unit(cur, "demand value outside [0, 1]");
    if (!(cur < prev))
      throw std::domain_error("demand curve is not strictly decreasing");
    prev = cur;
  }

  DemandCurve d = demand;  // owned by the evaluators
  auto integrand = [d](double x) { return 1.0 - d.inverse(x); };

  CostFunction c;
  c.family = CostFunction::Family::custom;
  c.fn = [integrand](double a) {
    return a <= 0.0 ? 0.0 : adaptive_simpson(integrand, 0.0, a, 1e-10);
  };
  c.fn_prime = integrand;
  // c''(a) = -1 / D'(D^{-1}(a)); a flat tangent means unbounded curvature,
  // capped to keep the evaluator finite.
  c.fn_second = [d](double a) {
    double dp = d.slope(d.inverse(a));
    if (!(dp < 0.0)) return 1e18;
    return std::min(-1.0 / dp, 1e18);  // -1 / -inf is the correct 0
  };
  double floor = 1e18;
  for (int i = 0; i < kFloorPoints; ++i)
    floor = std::min(floor,
                     c.fn_second(static_cast<double>(i) / (kFloorPoints - 1)));
  c.custom_curvature_min = std::max(floor, 0.0);
  return c;
}

double ResponseCurve::value(double alpha) const {
  require_unit(alpha, "kept share outside [0, 1]");
  double target = 1.0 - alpha;
  double cap = type.effort_cap();
  if (type.cost_prime(0.0) >= target) return 0.0;
  if (type.cost_prime(cap) <= target) return cap;
  return bisect_root([&](double a) { return type.cost_prime(a) - target; },
                     0.0, cap, 1e-10);
}

ResponseCurve response_curve(const CostFunction& cost, double effort_cap) {
  require(effort_cap > 0.0 && std::isfinite(effort_cap),
          "response curve: effort cap must be positive");
  OutcomeGrid grid{{0.0, 1.0}};
  ProductionTechnology tech;
  // Probe construction to learn c'(E), then rebuild with the tight slope
  // bound the carrier type advertises.
  AgentType probe(grid, tech, cost, effort_cap, 1e12);
  double need = probe.cost_prime(effort_cap) * effort_cap;
  return ResponseCurve{
      AgentType(grid, tech, cost, effort_cap, std::max(1.0, need))};
}

double expected_pricing_utility(const DemandCurve& demand, double alpha) {
  return alpha * demand.value(alpha);
}

AgentType agent_from_demand(const DemandCurve& demand) {
  OutcomeGrid grid{{0.0, 1.0}};
  ProductionTechnology tech;
  return AgentType(grid, tech, demand_to_cost(demand), 1.0, 1.0);
}

std::vector<CorrespondenceRow> correspondence_table(const DemandCurve& demand,
                                                    std::size_t points) {
  require(points >= 2, "correspondence table needs >= 2 points");
  ResponseCurve rc = response_curve(demand_to_cost(demand), 1.0);
  std::vector<CorrespondenceRow> rows;
  rows.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    CorrespondenceRow row;
    row.alpha = static_cast<double>(i) / static_cast<double>(points - 1);
    row.demand = demand.value(row.alpha);
    row.response = rc.value(row.alpha);
    row.pricing_utility = row.alpha * row.demand;
    row.contracting_utility = row.alpha * row.response;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pact
