#pragma once

#include <vector>

#include "absorb/measure.hpp"
#include "absorb/model.hpp"

namespace absorb {

struct OccupationOptions {
  double tol = 1e-12;        // stop once circulating transient mass is below this
  long max_iter = 1'000'000; // iteration budget for the power-series fallback
};

// Expected number of visits to each feasible pair strictly before the
// absorbing set is hit, starting from the model's initial distribution.
// Solved as the linear system (I - P^T) m = eta over the reachable
// transient states; falls back to power-series accumulation when the
// solve is unreliable. Throws NonAbsorbing when mass keeps circulating.
StateActionMeasure occupation_measure(const Model& m, const StationaryPolicy& policy,
                                      const OccupationOptions& opts = {});

// Total occupation mass; equals E[T_Delta].
double expected_hitting_time(const Model& m, const StationaryPolicy& policy,
                             const OccupationOptions& opts = {});

// Entry t is P{T_Delta > t} for t = 0..t_max.
std::vector<double> survival_curve(const Model& m, const StationaryPolicy& policy, int t_max);

// Sum of P{T_Delta > t} over t >= n, closed through the linear solve.
double tail_sum(const Model& m, const StationaryPolicy& policy, int n,
                const OccupationOptions& opts = {});

// Entry n = max over the family of tail_sum(., n), n = 0..n_max.
// Nonincreasing in n. Throws EmptyFamily.
std::vector<double> uniform_absorption_profile(const Model& m,
                                               const std::vector<StationaryPolicy>& family,
                                               int n_max, const OccupationOptions& opts = {});

// result[k][i] = occupation-marginal mass that policy k places on gammas[i].
// The sets must be nested decreasing (throws NotDecreasing).
std::vector<std::vector<double>> escaping_mass_by_policy(
    const Model& m, const std::vector<StationaryPolicy>& family,
    const std::vector<StateSet>& gammas, const OccupationOptions& opts = {});

// Entry i = max over the family of the occupation mass on gammas[i].
std::vector<double> escaping_mass(const Model& m, const std::vector<StationaryPolicy>& family,
                                  const std::vector<StateSet>& gammas,
                                  const OccupationOptions& opts = {});

// The fully randomized reference policy: action a_k (declaration order)
// gets weight 2^-(k+1), renormalized over the available actions. Its
// induced kernel dominates Q(.|x,a) for every feasible action.
StationaryPolicy reference_policy(const Model& m);

struct ReferenceMeasureConfig {
  double beta = 0.5;   // geometric mixing weight, in (0,1)
  double tol = 1e-12;  // truncation tolerance for the remaining geometric weight
};

// The geometric mixture (1-beta) sum_k beta^k eta K^k under the reference
// policy, truncated once the remaining weight is below tol and every
// reachable state has been touched, then renormalized to total mass one.
// Its support equals the reachable closure of supp(eta).
StateMeasure reference_measure(const Model& m, const ReferenceMeasureConfig& cfg = {});

struct AbsorptionReport {
  double expected_hitting_time = 0.0;
  std::vector<double> survival;  // P{T > t}, t = 0..t_max
  std::vector<double> tail;      // sum_{t>=n} P{T > t}, n = 0..t_max
};

AbsorptionReport absorption_report(const Model& m, const StationaryPolicy& policy, int t_max,
                                   const OccupationOptions& opts = {});

}  // namespace absorb
