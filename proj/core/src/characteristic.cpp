#include "absorb/characteristic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "absorb/absorption.hpp"
#include "absorb/lp.hpp"

namespace absorb {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Occupation: return "Occupation";
    case Verdict::Phantom: return "Phantom";
    case Verdict::NotSolution: return "NotSolution";
  }
  return "?";
}

double characteristic_residual(const Model& m, const StateActionMeasure& mu) {
  std::vector<double> inflow(m.num_states(), 0.0);
  double off_feasible = 0.0;
  double on_absorbing = 0.0;
  for (const auto& [key, mass] : mu.entries()) {
    auto [x, a] = key;
    if (x < 0 || x >= m.num_states() || a < 0 || a >= m.num_actions(x)) {
      off_feasible += std::abs(mass);
      continue;
    }
    if (m.is_absorbing(x)) on_absorbing += std::abs(mass);
    for (const auto& [to, p] : m.row(x, a)) inflow[to] += mass * p;
  }
  StateMeasure marginal = mu.marginal_x();
  double residual = std::max(off_feasible, on_absorbing);
  for (int x = 0; x < m.num_states(); ++x) {
    if (m.is_absorbing(x)) continue;
    double gap = std::abs(marginal.at(x) - m.initial()[x] - inflow[x]);
    residual = std::max(residual, gap);
  }
  return residual;
}

namespace {

// One application of the killed kernel: out(x) = sum_y v(y) K(x|y) for x
// outside the absorbing set.
std::vector<double> apply_killed(const Model& m, const std::vector<SparseRow>& kernel,
                                 const std::vector<double>& v) {
  std::vector<double> out(m.num_states(), 0.0);
  for (int y = 0; y < m.num_states(); ++y) {
    if (v[y] == 0.0) continue;
    for (const auto& [to, p] : kernel[y]) {
      if (!m.is_absorbing(to)) out[to] += v[y] * p;
    }
  }
  return out;
}

double l1_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

double invariance_gap(const Model& m, const std::vector<SparseRow>& kernel,
                      const std::vector<double>& v) {
  std::vector<double> next = apply_killed(m, kernel, v);
  double gap = 0.0;
  for (int x = 0; x < m.num_states(); ++x) gap = std::max(gap, std::abs(next[x] - v[x]));
  return gap;
}

}  // namespace

DecompositionResult decompose(const Model& m, const StateActionMeasure& mu,
                              const DecomposeOptions& opts) {
  double residual = characteristic_residual(m, mu);
  if (residual > opts.residual_tol) {
    throw NotASolution("characteristic residual " + std::to_string(residual) +
                       " exceeds tolerance " + std::to_string(opts.residual_tol));
  }
  Disintegration dis = disintegrate(mu, m);
  const auto kernel = induced_kernel(m, dis.policy);

  std::vector<double> nu(m.num_states(), 0.0);
  for (const auto& [x, v] : dis.marginal.entries()) {
    if (!m.is_absorbing(x)) nu[x] = v;
  }

  // Iterate the killed kernel until the transient mass has drained. The
  // limit is detected either as a plain l1-Cauchy stop (period 1) or as an
  // exact repeat p steps back, in which case the invariant measure is the
  // average over the detected cycle.
  const int cap = std::min<int>(opts.period_cap, m.num_states() + 1);
  std::deque<std::vector<double>> recent{nu};
  double gap = 0.0;
  long iterations = 0;
  int period = 0;
  for (long t = 1; t <= opts.max_iter; ++t) {
    nu = apply_killed(m, kernel, nu);
    iterations = t;
    period = 0;
    for (int p = 1; p <= static_cast<int>(recent.size()); ++p) {
      gap = l1_gap(nu, recent[recent.size() - p]);
      if (gap < opts.tol) {
        period = p;
        break;
      }
    }
    if (period > 0) break;
    recent.push_back(nu);
    if (static_cast<int>(recent.size()) > cap) recent.pop_front();
  }
  if (period == 0) {
    throw NoConvergence("tail iteration did not contract within max_iter");
  }
  if (period > 1) {
    // Cesaro average over one period of the cycle.
    std::vector<double> avg = nu;
    for (int p = 1; p < period; ++p) {
      const auto& prev = recent[recent.size() - p];
      for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += prev[i];
    }
    for (double& v : avg) v /= period;
    nu = std::move(avg);
  }

  DecompositionResult result{.occupation_part = {},
                             .invariant_part = {},
                             .policy = dis.policy,
                             .residuals = {.characteristic = residual,
                                           .invariance = invariance_gap(m, kernel, nu),
                                           .cauchy_gap = gap,
                                           .iterations = iterations,
                                           .period = period}};

  StateActionMeasure invariant;
  for (int x = 0; x < m.num_states(); ++x) {
    if (nu[x] <= 0.0) continue;
    const auto& probs = result.policy.at(x);
    for (int a = 0; a < m.num_actions(x); ++a) {
      if (probs[a] > 0.0) invariant.set(x, a, nu[x] * probs[a]);
    }
  }
  result.invariant_part = std::move(invariant);
  result.occupation_part = mu.minus(result.invariant_part, 10.0 * opts.residual_tol);
  return result;
}

std::optional<StateActionMeasure> find_phantom_direction(const Model& m) {
  // Variables: feasible pairs whose state is outside the absorbing set.
  std::vector<std::pair<int, int>> vars;
  std::vector<int> var_of_pair(m.num_pairs(), -1);
  for (int k = 0; k < m.num_pairs(); ++k) {
    auto [x, a] = m.pair_at(k);
    if (!m.is_absorbing(x)) {
      var_of_pair[k] = static_cast<int>(vars.size());
      vars.emplace_back(x, a);
    }
  }
  if (vars.empty()) return std::nullopt;

  std::vector<int> row_of_state(m.num_states(), -1);
  int rows = 0;
  for (int x = 0; x < m.num_states(); ++x) {
    if (!m.is_absorbing(x)) row_of_state[x] = rows++;
  }

  LpProblem lp;
  lp.objective.assign(vars.size(), 0.0);
  lp.eq_lhs.assign(rows + 1, std::vector<double>(vars.size(), 0.0));
  lp.eq_rhs.assign(rows + 1, 0.0);
  for (int j = 0; j < static_cast<int>(vars.size()); ++j) {
    auto [x, a] = vars[j];
    lp.eq_lhs[row_of_state[x]][j] += 1.0;  // theta^X(x)
    for (const auto& [to, p] : m.row(x, a)) {
      if (row_of_state[to] >= 0) lp.eq_lhs[row_of_state[to]][j] -= p;  // (theta Q)(to)
    }
    lp.eq_lhs[rows][j] = 1.0;  // normalization
  }
  lp.eq_rhs[rows] = 1.0;

  LpOutcome outcome = solve_lp(lp);
  if (outcome.status != LpStatus::Optimal) return std::nullopt;

  StateActionMeasure theta;
  for (int j = 0; j < static_cast<int>(vars.size()); ++j) {
    double v = outcome.solution[j];
    if (v > kSupportEps) theta.set(vars[j].first, vars[j].second, v);
  }
  return theta;
}

Classification classify(const Model& m, const StateActionMeasure& mu,
                        const StateMeasure& lambda_beta, double residual_tol) {
  Classification c;
  c.residual = characteristic_residual(m, mu);
  if (c.residual > residual_tol) {
    c.verdict = Verdict::NotSolution;
    return c;
  }
  StateSet mu_support = mu.marginal_x().support();
  StateSet lambda_support = lambda_beta.support();
  for (int x : mu_support.members()) {
    if (!lambda_support.contains(x)) c.off_support_states.push_back(x);
  }
  c.verdict = c.off_support_states.empty() ? Verdict::Occupation : Verdict::Phantom;
  return c;
}

bool singularity_check(const Model& m, const StateActionMeasure& occupation,
                       const StateActionMeasure& invariant) {
  (void)m;
  StateSet a = occupation.marginal_x().support();
  StateSet b = invariant.marginal_x().support();
  for (int x : a.members()) {
    if (b.contains(x)) return false;
  }
  return true;
}

}  // namespace absorb
