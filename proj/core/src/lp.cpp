#include "absorb/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "absorb/errors.hpp"

namespace absorb {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

namespace {

constexpr double kPivotTol = 1e-11;    // below this a pivot is untrustworthy
constexpr double kReducedTol = 1e-9;   // entering threshold / phase-1 certificate
constexpr long kPivotBudget = 1'000'000;

// Dense tableau over [structural vars | artificials | rhs].
struct Tableau {
  int rows = 0;
  int structural = 0;  // columns eligible for entering
  int cols = 0;        // structural + artificials
  std::vector<std::vector<double>> t;  // rows x (cols+1)
  std::vector<double> obj;             // reduced costs, cols+1 (last = -value)
  std::vector<int> basis;
  long pivots = 0;

  double& rhs(int i) { return t[i][cols]; }

  void pivot(int r, int j) {
    if (++pivots > kPivotBudget) {
      throw LpNumericalFailure("simplex pivot budget exceeded");
    }
    double inv = 1.0 / t[r][j];
    for (int k = 0; k <= cols; ++k) t[r][k] *= inv;
    t[r][j] = 1.0;
    for (int i = 0; i < rows; ++i) {
      if (i == r || t[i][j] == 0.0) continue;
      double f = t[i][j];
      for (int k = 0; k <= cols; ++k) t[i][k] -= f * t[r][k];
      t[i][j] = 0.0;
    }
    if (obj[j] != 0.0) {
      double f = obj[j];
      for (int k = 0; k <= cols; ++k) obj[k] -= f * t[r][k];
      obj[j] = 0.0;
    }
    basis[r] = j;
  }

  // Bland's rule: smallest-index entering column, smallest-basic-index tie
  // break on the ratio test. Returns Optimal when no column improves.
  LpStatus run(int entering_limit) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < entering_limit; ++j) {
        if (obj[j] < -kReducedTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      bool tiny_only = false;
      for (int i = 0; i < rows; ++i) {
        double a = t[i][enter];
        if (a <= 0.0) continue;
        if (a <= kPivotTol) {
          tiny_only = true;
          continue;
        }
        double ratio = rhs(i) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = std::min(best_ratio, ratio);
          leave = i;
        }
      }
      if (leave < 0) {
        if (tiny_only) {
          throw LpNumericalFailure("all candidate pivots below 1e-11 in column " +
                                   std::to_string(enter));
        }
        return LpStatus::Unbounded;
      }
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpOutcome solve_lp(const LpProblem& problem) {
  const int n = problem.num_vars();
  const int m = problem.num_rows();
  if (static_cast<int>(problem.eq_lhs.size()) != m) {
    throw DimensionMismatch("eq_lhs and eq_rhs disagree on the number of rows");
  }
  for (const auto& row : problem.eq_lhs) {
    if (static_cast<int>(row.size()) != n) {
      throw DimensionMismatch("constraint row arity does not match the objective");
    }
  }
  if (!problem.lower.empty() && static_cast<int>(problem.lower.size()) != n) {
    throw DimensionMismatch("lower bound vector has wrong arity");
  }
  if (!problem.upper.empty() && static_cast<int>(problem.upper.size()) != n) {
    throw DimensionMismatch("upper bound vector has wrong arity");
  }
  for (double b : problem.eq_rhs) {
    if (!std::isfinite(b)) throw DimensionMismatch("non-finite right-hand side");
  }

  std::vector<double> lower =
      problem.lower.empty() ? std::vector<double>(n, 0.0) : problem.lower;

  // Count upper-bound rows; reject empty boxes outright.
  std::vector<int> bounded;
  if (!problem.upper.empty()) {
    for (int j = 0; j < n; ++j) {
      if (!problem.upper[j]) continue;
      if (*problem.upper[j] < lower[j] - 1e-12) return {LpStatus::Infeasible, {}, 0.0, 0};
      bounded.push_back(j);
    }
  }

  const int rows = m + static_cast<int>(bounded.size());
  const int structural = n + static_cast<int>(bounded.size());  // + bound slacks

  if (structural == 0) {
    for (double b : problem.eq_rhs) {
      if (std::abs(b) > kReducedTol) return {LpStatus::Infeasible, {}, 0.0, 0};
    }
    return {LpStatus::Optimal, {}, 0.0, 0};
  }

  Tableau tb;
  tb.rows = rows;
  tb.structural = structural;
  tb.cols = structural + rows;
  tb.t.assign(rows, std::vector<double>(tb.cols + 1, 0.0));
  tb.basis.resize(rows);

  // Shift x = y + lower so all variables start at zero.
  for (int i = 0; i < m; ++i) {
    double b = problem.eq_rhs[i];
    for (int j = 0; j < n; ++j) {
      tb.t[i][j] = problem.eq_lhs[i][j];
      b -= problem.eq_lhs[i][j] * lower[j];
    }
    tb.rhs(i) = b;
  }
  for (int k = 0; k < static_cast<int>(bounded.size()); ++k) {
    int i = m + k;
    int j = bounded[k];
    tb.t[i][j] = 1.0;
    tb.t[i][n + k] = 1.0;  // bound slack
    tb.rhs(i) = *problem.upper[j] - lower[j];
  }
  for (int i = 0; i < rows; ++i) {
    if (tb.rhs(i) < 0.0) {
      for (int k = 0; k <= tb.cols; ++k) tb.t[i][k] = -tb.t[i][k];
    }
    tb.t[i][structural + i] = 1.0;
    tb.basis[i] = structural + i;
  }

  // Phase 1: minimize the artificial mass.
  tb.obj.assign(tb.cols + 1, 0.0);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k <= tb.cols; ++k) {
      if (k < structural || k == tb.cols) tb.obj[k] -= tb.t[i][k];
    }
  }
  LpStatus phase1 = tb.run(structural);
  if (phase1 != LpStatus::Optimal) {
    throw LpNumericalFailure("phase 1 terminated without an optimum");
  }
  double artificial_mass = 0.0;
  for (int i = 0; i < rows; ++i) {
    if (tb.basis[i] >= structural) artificial_mass += tb.rhs(i);
  }
  if (artificial_mass > kReducedTol) {
    return {LpStatus::Infeasible, {}, 0.0, tb.pivots};
  }

  // Drive leftover artificials out of the basis; rows that offer no pivot
  // are redundant and can be dropped.
  for (int i = tb.rows - 1; i >= 0; --i) {
    if (tb.basis[i] < structural) continue;
    int enter = -1;
    double best = kPivotTol;
    for (int j = 0; j < structural; ++j) {
      if (std::abs(tb.t[i][j]) > best) {
        best = std::abs(tb.t[i][j]);
        enter = j;
      }
    }
    if (enter >= 0) {
      tb.pivot(i, enter);
    } else {
      tb.t.erase(tb.t.begin() + i);
      tb.basis.erase(tb.basis.begin() + i);
      --tb.rows;
    }
  }

  // Phase 2 on the shifted objective.
  std::vector<double> cost(structural, 0.0);
  for (int j = 0; j < n; ++j) cost[j] = problem.objective[j];
  tb.obj.assign(tb.cols + 1, 0.0);
  for (int j = 0; j < structural; ++j) tb.obj[j] = cost[j];
  for (int i = 0; i < tb.rows; ++i) {
    double cb = cost[tb.basis[i]];
    if (cb == 0.0) continue;
    for (int k = 0; k <= tb.cols; ++k) tb.obj[k] -= cb * tb.t[i][k];
  }
  LpStatus phase2 = tb.run(structural);
  if (phase2 == LpStatus::Unbounded) {
    return {LpStatus::Unbounded, {}, 0.0, tb.pivots};
  }

  std::vector<double> solution(lower);
  for (int i = 0; i < tb.rows; ++i) {
    if (tb.basis[i] < n) solution[tb.basis[i]] += tb.rhs(i);
  }
  double value = 0.0;
  for (int j = 0; j < n; ++j) value += problem.objective[j] * solution[j];
  return {LpStatus::Optimal, std::move(solution), value, tb.pivots};
}

}  // namespace absorb
