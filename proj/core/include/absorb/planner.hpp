#pragma once

#include <map>
#include <utility>
#include <vector>

#include "absorb/measure.hpp"
#include "absorb/model.hpp"

namespace absorb {

// Real-valued coefficients on state-action pairs (costs, constraint rows).
using PairCoeffs = std::map<std::pair<int, int>, double>;

enum class ConstraintSense { LessEqual, GreaterEqual, Equal };

struct LinearConstraint {
  PairCoeffs coeffs;  // sparse; missing pairs count as zero
  double bound = 0.0;
  ConstraintSense sense = ConstraintSense::LessEqual;
};

struct PlanningProblem {
  Model model;
  PairCoeffs cost;  // must cover every pair of a reachable transient state
  std::vector<LinearConstraint> constraints;
};

struct Plan {
  double value = 0.0;
  StateActionMeasure occupation;
  StationaryPolicy policy;
  double residual = 0.0;  // characteristic residual of the occupation
};

// Minimizes total cost over the characteristic-system polytope with
// variables restricted to the transient states reachable from the initial
// distribution (which keeps invariant directions out of the feasible
// set), then disintegrates the optimal measure into a stationary policy.
// Throws InfeasibleProblem / UnboundedProblem.
Plan solve_constrained(const PlanningProblem& problem);

}  // namespace absorb
