#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace pact {

// Dense linear program over x in R^n with per-variable bounds (either side
// may be infinite) and row constraints a.x {<=,>=,==} b.
struct LinearProgram {
  enum class Sense { maximize, minimize };
  enum class Relation { less_equal, greater_equal, equal };

  struct Constraint {
    std::vector<double> coeffs;
    Relation rel = Relation::less_equal;
    double rhs = 0.0;
  };

  Sense sense = Sense::maximize;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<double> lower, upper;

  explicit LinearProgram(std::size_t nvars = 0,
                         Sense sense_in = Sense::maximize)
      : sense(sense_in),
        objective(nvars, 0.0),
        lower(nvars, -std::numeric_limits<double>::infinity()),
        upper(nvars, std::numeric_limits<double>::infinity()) {}

  std::size_t var_count() const { return objective.size(); }
  void add_constraint(std::vector<double> coeffs, Relation rel, double rhs) {
    constraints.push_back({std::move(coeffs), rel, rhs});
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;       // original variable space (empty if infeasible)
  double value = 0.0;          // objective at x, in the stated sense
  double max_violation = 0.0;  // worst constraint/bound violation at x
  int iterations = 0;          // total simplex pivots (both phases)
};

// Two-phase tableau simplex with Bland's rule (deterministic pivot order:
// lowest eligible column in, lowest basic index out on ratio ties).
// Feasibility and optimality tolerances are 1e-9. Throws
// std::invalid_argument on dimension mismatches and std::runtime_error if the
// pivot count exceeds the stall cap.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace pact
