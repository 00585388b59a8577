#pragma once

#include <cstddef>
#include <vector>

#include "pact/env.hpp"
#include "pact/numeric.hpp"

namespace pact {

// Purchase probability D(p) for a posted price p in [0, 1]. Strictly
// decreasing with values in [0, 1]. Tabulated curves interpolate with a
// shape-preserving cubic so monotonicity survives between knots; their
// inverse is recovered by bisection on that interpolant, which keeps
// inverse(value(p)) == p instead of fitting a second, inconsistent spline.
struct DemandCurve {
  enum class Family { linear, power, tabulated };

  Family family = Family::linear;
  double exponent = 1.0;           // power: D(p) = (1 - p)^exponent
  std::vector<double> prices;      // tabulated: increasing knots spanning [0, 1]
  std::vector<double> quantities;  // tabulated: strictly decreasing, in [0, 1]
  MonotoneCubic spline;            // tabulated only, built by the factory

  static DemandCurve linear_demand();  // D(p) = 1 - p
  static DemandCurve power_demand(double exponent);
  static DemandCurve tabulated_demand(std::vector<double> prices,
                                      std::vector<double> quantities);

  double value(double p) const;  // D(p); price outside [0, 1] -> domain error
  // Price at which demand equals q; analytic for the closed-form families,
  // monotone bisection for tabulated ones. q outside the tabulated range
  // clamps to the nearest endpoint price.
  double inverse(double q) const;
  double slope(double p) const;  // D'(p)
};

// Effort the agent best-responds with when the principal keeps share alpha
// of a binary outcome: a(alpha) = (c')^{-1}(1 - alpha), clipped to [0, E].
// Nonincreasing in alpha by convexity of the cost.
struct ResponseCurve {
  AgentType type;  // binary-outcome carrier for the cost evaluators

  double value(double alpha) const;
  double operator()(double alpha) const { return value(alpha); }
};

ResponseCurve response_curve(const CostFunction& cost, double effort_cap = 1.0);

// Builds the effort cost whose response curve coincides with the demand
// curve: c(a) = integral_0^a [1 - D^{-1}(x)] dx, evaluated by adaptive
// Simpson quadrature to 1e-10. The integrand is nondecreasing, so the result
// is convex with c(0) = 0. Throws std::domain_error when D is not strictly
// decreasing on a dense probe grid.
CostFunction demand_to_cost(const DemandCurve& demand);

// Seller's expected utility at kept share (price) alpha: alpha * D(alpha).
double expected_pricing_utility(const DemandCurve& demand, double alpha);

// Binary-outcome agent whose contracting problem reproduces the pricing
// problem: outcomes {0, 1}, success probability equal to effort, cost from
// demand_to_cost, effort cap 1.
AgentType agent_from_demand(const DemandCurve& demand);

// One comparison row of the two problems at kept share alpha.
struct CorrespondenceRow {
  double alpha = 0.0;
  double demand = 0.0;               // D(alpha)
  double response = 0.0;             // a(alpha) under the constructed cost
  double pricing_utility = 0.0;      // alpha * D(alpha)
  double contracting_utility = 0.0;  // (1 - beta) * a(beta), beta = 1 - alpha
};

// Evaluates both sides of the correspondence on a uniform alpha grid.
std::vector<CorrespondenceRow> correspondence_table(const DemandCurve& demand,
                                                    std::size_t points);

}  // namespace pact
