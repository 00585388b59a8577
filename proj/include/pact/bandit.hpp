#pragma once

#include <cstddef>
#include <vector>

#include "pact/env.hpp"
#include "pact/rng.hpp"
#include "pact/trace.hpp"

namespace pact {

// Mixture of agent types the principal faces.
struct TypeDistribution {
  std::vector<AgentType> support;
  std::vector<double> weights;

  void validate() const;  // nonempty, weights >= 0 summing to 1
};

// Who shows up each round: i.i.d. draws from a distribution, or an explicit
// per-round sequence of indices into the support pool.
struct ArrivalProcess {
  enum class Mode { stochastic, adversarial };

  Mode mode = Mode::stochastic;
  TypeDistribution types;
  std::vector<std::size_t> sequence;  // adversarial: index per round

  static ArrivalProcess stochastic(TypeDistribution dist);
  static ArrivalProcess adversarial(std::vector<AgentType> pool,
                                    std::vector<std::size_t> seq);
};

// Arm space for the contract bandit. Arms are measured in the L1 payment
// metric; a linear slope beta maps to payments beta*pi, so its metric scale
// is the sum of outcome levels. The utility Lipschitz constant is the worst
// case of 4L^2/(lambda-mu)+2 over the support; certification requires every
// support type to pass the curvature validator.
struct ContractSpace {
  enum class Kind { linear_interval, monotone_grid };

  Kind kind = Kind::linear_interval;
  double beta_cap = 1.0;     // linear: slopes in [0, beta_cap]
  std::size_t levels = 2;    // monotone: payment vector dimension
  double grid_step = 0.05;   // monotone lattice step; also the fixed-grid arm
                             // spacing used by the adversarial runner
  double lipschitz = 0.0;
  double metric_scale = 1.0;
  bool certified = false;

  static ContractSpace linear(const TypeDistribution& dist, double beta_cap,
                              double grid_step = 0.05);
  // Monotone bounded payment vectors on a lattice. Kept small by
  // construction: levels <= 3 and grid_step >= 0.05.
  static ContractSpace monotone(const TypeDistribution& dist,
                                std::size_t levels, double grid_step);
};

// Exact mixture utility sum_theta w_theta * u_P(s | theta), with each type
// best-responding.
double expected_utility_oracle(const TypeDistribution& dist,
                               const LinearContract& s);
double expected_utility_oracle(const TypeDistribution& dist, const Contract& s);

// Zooming bandit over the contract space under i.i.d. arrivals: activate an
// arm at any lattice point left uncovered, then play the arm maximizing
// mean + 2*conf with conf = sqrt(8 log T / n); an arm covers the ball of
// radius conf/lipschitz around it. The trace logs realized utility per round
// and cumulative pseudo-regret against the lattice-max benchmark; metadata
// records the benchmark, final arm count, and covering violations (0 unless
// the covering invariant ever failed a post-activation audit).
// Throws std::invalid_argument on mode/horizon errors and std::runtime_error
// when the space is not certified by the curvature validator.
RegretTrace run_zooming(const ArrivalProcess& arrival,
                        const ContractSpace& space, std::size_t horizon,
                        Rng& rng);

// Exponential-weights bandit over the fixed grid_step lattice for adversarial
// arrivals (a declared stand-in for an adversarial zooming scheme; the trace
// metadata says so). Learning rate sqrt(log K / (T K)), rewards mapped to
// [0, 1] via (u+1)/2. Regret is measured against the best fixed lattice arm
// on the realized type sequence.
RegretTrace run_adversarial_grid(const ArrivalProcess& arrival,
                                 const ContractSpace& space,
                                 std::size_t horizon, Rng& rng);

}  // namespace pact
