#pragma once

#include <optional>
#include <vector>

namespace absorb {

// min c.x  subject to  A x = b,  lower <= x (<= upper where given).
// `lower` defaults to all zeros when empty; `upper` entries are optional.
struct LpProblem {
  std::vector<double> objective;
  std::vector<std::vector<double>> eq_lhs;
  std::vector<double> eq_rhs;
  std::vector<double> lower;
  std::vector<std::optional<double>> upper;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(eq_rhs.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> solution;  // set when Optimal
  double value = 0.0;
  long pivots = 0;
};

// Dense two-phase primal simplex with Bland's anti-cycling rule.
// Infeasibility is certified by a phase-1 optimum above 1e-9; unboundedness
// by an improving ray. Throws DimensionMismatch on malformed input and
// LpNumericalFailure when every candidate pivot falls below 1e-11.
LpOutcome solve_lp(const LpProblem& problem);

}  // namespace absorb
