#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "absorb/measure.hpp"
#include "absorb/model.hpp"

namespace absorb {

struct Trajectory {
  std::vector<std::pair<int, int>> steps;  // (state, action) pairs before absorption
  bool absorbed = false;
  int final_state = -1;                    // in Delta iff absorbed
  std::optional<long> hitting_time;        // empty when censored at the horizon
};

// Samples X_0 from eta, then alternates action draws from sigma(.|x) and
// state draws from Q(.|x,a), stopping on entry into the absorbing set or
// at the horizon. Fully determined by the seed.
Trajectory simulate(const Model& m, const StationaryPolicy& policy, std::uint64_t seed,
                    long horizon = 100'000);

struct Estimate {
  double point = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

struct OccupationEstimate {
  StateActionMeasure mean;                          // per-cell visit-count means
  std::map<std::pair<int, int>, double> std_error;  // per-cell standard errors
  std::size_t n_samples = 0;
  double censored_fraction = 0.0;  // censored tails are reported, never dropped
  Estimate total;                  // total-mass (hitting time) estimate
};

// Empirical occupation measure over n_traj trajectories with pre-assigned
// per-trajectory streams: output is independent of evaluation order.
// Throws AllCensored when no trajectory reaches the absorbing set.
OccupationEstimate estimate_occupation(const Model& m, const StationaryPolicy& policy,
                                       long n_traj, std::uint64_t seed, long horizon = 100'000);

}  // namespace absorb
