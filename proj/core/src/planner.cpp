#include "absorb/planner.hpp"

#include <string>

#include "absorb/characteristic.hpp"
#include "absorb/lp.hpp"

namespace absorb {

Plan solve_constrained(const PlanningProblem& problem) {
  const Model& m = problem.model;

  // Variables: feasible pairs of transient states reachable from the
  // initial distribution. Restricting to them keeps every invariant
  // direction out of the feasible set, so the optimum is an occupation
  // measure rather than a phantom.
  StateSet reach = reachable_states(m, m.support_of_initial());
  std::vector<std::pair<int, int>> vars;
  std::vector<int> row_of_state(m.num_states(), -1);
  int rows = 0;
  for (int x : reach.members()) {
    if (m.is_absorbing(x)) continue;
    row_of_state[x] = rows++;
    for (int a = 0; a < m.num_actions(x); ++a) vars.emplace_back(x, a);
  }

  LpProblem lp;
  const int base_vars = static_cast<int>(vars.size());
  lp.objective.resize(base_vars);
  for (int j = 0; j < base_vars; ++j) {
    auto it = problem.cost.find(vars[j]);
    if (it == problem.cost.end()) {
      throw BadParameter("cost undefined for reachable pair ('" + m.state_name(vars[j].first) +
                         "', '" + m.action_names(vars[j].first)[vars[j].second] + "')");
    }
    lp.objective[j] = it->second;
  }

  // Characteristic rows: outflow minus inflow equals the initial mass.
  lp.eq_lhs.assign(rows, std::vector<double>(base_vars, 0.0));
  lp.eq_rhs.assign(rows, 0.0);
  for (int j = 0; j < base_vars; ++j) {
    auto [x, a] = vars[j];
    lp.eq_lhs[row_of_state[x]][j] += 1.0;
    for (const auto& [to, p] : m.row(x, a)) {
      if (row_of_state[to] >= 0) lp.eq_lhs[row_of_state[to]][j] -= p;
    }
  }
  for (int x = 0; x < m.num_states(); ++x) {
    if (row_of_state[x] >= 0) lp.eq_rhs[row_of_state[x]] = m.initial()[x];
  }

  // User constraints; inequality senses get a slack/surplus column each.
  int extra = 0;
  for (const auto& c : problem.constraints) {
    if (c.sense != ConstraintSense::Equal) ++extra;
  }
  for (auto& row : lp.eq_lhs) row.resize(base_vars + extra, 0.0);
  lp.objective.resize(base_vars + extra, 0.0);

  int next_slack = base_vars;
  for (const auto& c : problem.constraints) {
    std::vector<double> row(base_vars + extra, 0.0);
    for (int j = 0; j < base_vars; ++j) {
      auto it = c.coeffs.find(vars[j]);
      if (it != c.coeffs.end()) row[j] = it->second;
    }
    switch (c.sense) {
      case ConstraintSense::LessEqual:
        row[next_slack++] = 1.0;
        break;
      case ConstraintSense::GreaterEqual:
        row[next_slack++] = -1.0;
        break;
      case ConstraintSense::Equal:
        break;
    }
    lp.eq_lhs.push_back(std::move(row));
    lp.eq_rhs.push_back(c.bound);
  }

  LpOutcome outcome = solve_lp(lp);
  if (outcome.status == LpStatus::Infeasible) {
    throw InfeasibleProblem("constraints exclude every occupation measure");
  }
  if (outcome.status == LpStatus::Unbounded) {
    throw UnboundedProblem(
        "cost has no lower bound on the polytope; the reachable model is not absorbing");
  }

  Plan plan;
  plan.value = outcome.value;
  for (int j = 0; j < base_vars; ++j) {
    double v = outcome.solution[j];
    if (v > 0.0) plan.occupation.set(vars[j].first, vars[j].second, v);
  }
  plan.policy = disintegrate(plan.occupation, m).policy;
  plan.residual = characteristic_residual(m, plan.occupation);
  return plan;
}

}  // namespace absorb
