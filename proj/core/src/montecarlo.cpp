#include "absorb/montecarlo.hpp"

#include <cmath>

#include "absorb/rng.hpp"

namespace absorb {

namespace {

// Inverse-CDF draw over (index, mass) weights in declaration order;
// clamps to the last positive entry so roundoff cannot fall off the end.
template <typename Weights>
int draw(SplitMix64& rng, const Weights& weights) {
  double u = rng.next_unit();
  double cum = 0.0;
  int last = -1;
  for (const auto& [idx, w] : weights) {
    if (w <= 0.0) continue;
    cum += w;
    last = idx;
    if (u < cum) return idx;
  }
  return last;
}

int draw_initial(SplitMix64& rng, const std::vector<double>& eta) {
  double u = rng.next_unit();
  double cum = 0.0;
  int last = -1;
  for (int x = 0; x < static_cast<int>(eta.size()); ++x) {
    if (eta[x] <= 0.0) continue;
    cum += eta[x];
    last = x;
    if (u < cum) return x;
  }
  return last;
}

int draw_action(SplitMix64& rng, const std::vector<double>& probs) {
  double u = rng.next_unit();
  double cum = 0.0;
  int last = -1;
  for (int a = 0; a < static_cast<int>(probs.size()); ++a) {
    if (probs[a] <= 0.0) continue;
    cum += probs[a];
    last = a;
    if (u < cum) return a;
  }
  return last;
}

Trajectory run_one(const Model& m, const StationaryPolicy& policy, SplitMix64 rng, long horizon) {
  Trajectory traj;
  int x = draw_initial(rng, m.initial());
  for (long t = 0; t < horizon; ++t) {
    if (m.is_absorbing(x)) {
      traj.absorbed = true;
      traj.final_state = x;
      traj.hitting_time = t;
      return traj;
    }
    int a = draw_action(rng, policy.at(x));
    traj.steps.emplace_back(x, a);
    x = draw(rng, m.row(x, a));
  }
  if (m.is_absorbing(x)) {
    traj.absorbed = true;
    traj.hitting_time = horizon;
  }
  traj.final_state = x;
  return traj;
}

}  // namespace

Trajectory simulate(const Model& m, const StationaryPolicy& policy, std::uint64_t seed,
                    long horizon) {
  if (horizon < 1) throw BadParameter("horizon must be at least 1");
  if (policy.num_states() != m.num_states()) {
    throw PolicyMismatch("policy is bound to a different model");
  }
  return run_one(m, policy, SplitMix64(seed), horizon);
}

OccupationEstimate estimate_occupation(const Model& m, const StationaryPolicy& policy,
                                       long n_traj, std::uint64_t seed, long horizon) {
  if (n_traj < 1) throw BadParameter("n_traj must be at least 1");
  if (horizon < 1) throw BadParameter("horizon must be at least 1");
  if (policy.num_states() != m.num_states()) {
    throw PolicyMismatch("policy is bound to a different model");
  }

  // Per-cell sums and sums of squares of per-trajectory visit counts.
  std::map<std::pair<int, int>, std::pair<double, double>> cells;
  double total_sum = 0.0;
  double total_sq = 0.0;
  long censored = 0;

  std::map<std::pair<int, int>, long> counts;
  for (long k = 0; k < n_traj; ++k) {
    Trajectory traj = run_one(m, policy, trajectory_stream(seed, k), horizon);
    if (!traj.absorbed) ++censored;
    counts.clear();
    for (const auto& step : traj.steps) ++counts[step];
    double t_total = static_cast<double>(traj.steps.size());
    total_sum += t_total;
    total_sq += t_total * t_total;
    for (const auto& [key, c] : counts) {
      auto& cell = cells[key];
      cell.first += static_cast<double>(c);
      cell.second += static_cast<double>(c) * static_cast<double>(c);
    }
  }
  if (censored == n_traj) {
    throw AllCensored("every trajectory was censored at the horizon");
  }

  const double n = static_cast<double>(n_traj);
  OccupationEstimate est;
  est.n_samples = static_cast<std::size_t>(n_traj);
  est.censored_fraction = static_cast<double>(censored) / n;
  for (const auto& [key, cell] : cells) {
    double mean = cell.first / n;
    est.mean.set(key.first, key.second, mean);
    double var = 0.0;
    if (n_traj > 1) {
      var = std::max(0.0, (cell.second - n * mean * mean) / (n - 1.0));
    }
    est.std_error[key] = std::sqrt(var / n);
  }
  double total_mean = total_sum / n;
  double total_var = 0.0;
  if (n_traj > 1) {
    total_var = std::max(0.0, (total_sq - n * total_mean * total_mean) / (n - 1.0));
  }
  est.total = {total_mean, std::sqrt(total_var / n), est.n_samples};
  return est;
}

}  // namespace absorb
