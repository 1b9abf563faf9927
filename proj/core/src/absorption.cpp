#include "absorb/absorption.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace absorb {

namespace {

// The transient part of the chain that the initial distribution can see:
// states reachable from supp(eta) and outside the absorbing set, with the
// induced kernel restricted to them. Everything downstream (occupation,
// hitting times, tail sums) is an affine function of this system.
struct TransientSystem {
  std::vector<int> states;    // global indices, ascending
  std::vector<int> local_of;  // global -> local index or -1
  Eigen::MatrixXd p;          // restricted kernel, p(i,j) = K(states[j] | states[i])
  Eigen::VectorXd eta;        // restricted initial mass
  double eta_outside = 0.0;   // initial mass already in the absorbing set
};

TransientSystem build_system(const Model& m, const StationaryPolicy& policy) {
  TransientSystem sys;
  StateSet reach = reachable_states(m, m.support_of_initial());
  for (int x : reach.members()) {
    if (!m.is_absorbing(x)) sys.states.push_back(x);
  }
  sys.local_of.assign(m.num_states(), -1);
  for (int i = 0; i < static_cast<int>(sys.states.size()); ++i) sys.local_of[sys.states[i]] = i;

  const auto kernel = induced_kernel(m, policy);
  const int n = static_cast<int>(sys.states.size());
  sys.p = Eigen::MatrixXd::Zero(n, n);
  sys.eta = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& [to, mass] : kernel[sys.states[i]]) {
      int j = sys.local_of[to];
      if (j >= 0) sys.p(i, j) += mass;
    }
    sys.eta(i) = m.initial()[sys.states[i]];
  }
  for (int x = 0; x < m.num_states(); ++x) {
    if (m.is_absorbing(x)) sys.eta_outside += m.initial()[x];
  }
  return sys;
}

// Power-series accumulation of eta^T sum_k P^k. Returns false when the
// circulating mass refuses to drop below tol within the budget.
bool accumulate_series(const TransientSystem& sys, const OccupationOptions& opts,
                       Eigen::VectorXd& out) {
  Eigen::VectorXd v = sys.eta;
  out = Eigen::VectorXd::Zero(sys.eta.size());
  for (long k = 0; k < opts.max_iter; ++k) {
    if (v.sum() < opts.tol) return true;
    out += v;
    v = sys.p.transpose() * v;
  }
  return v.sum() < opts.tol;
}

// Occupation mass per transient state. Direct linear solve of
// (I - P^T) mass = eta first, series accumulation as fallback.
Eigen::VectorXd occupation_vector(const TransientSystem& sys, const OccupationOptions& opts) {
  const int n = static_cast<int>(sys.states.size());
  if (n == 0) return Eigen::VectorXd();

  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - sys.p.transpose();
  Eigen::VectorXd mass = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(sys.eta);
  bool clean = mass.allFinite();
  if (clean) {
    double residual = (a * mass - sys.eta).lpNorm<Eigen::Infinity>();
    clean = residual <= 1e-10 && mass.minCoeff() >= -1e-9;
  }
  if (clean) {
    mass = mass.cwiseMax(0.0);
    return mass;
  }

  Eigen::VectorXd accumulated;
  if (!accumulate_series(sys, opts, accumulated)) {
    if (!accumulated.allFinite()) {
      throw SingularSystem("occupation solve failed and the series iteration diverged");
    }
    throw NonAbsorbing(
        "circulating mass did not drop below tol within max_iter; "
        "the model/policy pair is not absorbing from the initial distribution");
  }
  return accumulated;
}

// Expected remaining transient steps per state: w solves (I - P) w = 1.
Eigen::VectorXd remaining_time_vector(const TransientSystem& sys, const OccupationOptions& opts) {
  const int n = static_cast<int>(sys.states.size());
  if (n == 0) return Eigen::VectorXd();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - sys.p;
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd w = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(ones);
  bool clean = w.allFinite();
  if (clean) {
    double residual = (a * w - ones).lpNorm<Eigen::Infinity>();
    clean = residual <= 1e-10 && w.minCoeff() >= 1.0 - 1e-9;
  }
  if (clean) return w;

  // Fallback: w = sum_k P^k 1, stopping once the increment is negligible.
  Eigen::VectorXd v = ones;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  for (long k = 0; k < opts.max_iter; ++k) {
    if (v.maxCoeff() < opts.tol) return acc;
    acc += v;
    v = sys.p * v;
  }
  if (!acc.allFinite()) throw SingularSystem("remaining-time iteration diverged");
  throw NonAbsorbing("remaining hitting time does not converge; model is not absorbing");
}

}  // namespace

StateActionMeasure occupation_measure(const Model& m, const StationaryPolicy& policy,
                                      const OccupationOptions& opts) {
  TransientSystem sys = build_system(m, policy);
  Eigen::VectorXd mass = occupation_vector(sys, opts);
  StateActionMeasure mu;
  for (int i = 0; i < static_cast<int>(sys.states.size()); ++i) {
    if (mass(i) <= 0.0) continue;
    int x = sys.states[i];
    const auto& probs = policy.at(x);
    for (int a = 0; a < m.num_actions(x); ++a) {
      if (probs[a] > 0.0) mu.set(x, a, mass(i) * probs[a]);
    }
  }
  return mu;
}

double expected_hitting_time(const Model& m, const StationaryPolicy& policy,
                             const OccupationOptions& opts) {
  TransientSystem sys = build_system(m, policy);
  return occupation_vector(sys, opts).sum();
}

std::vector<double> survival_curve(const Model& m, const StationaryPolicy& policy, int t_max) {
  if (t_max < 0) throw BadParameter("t_max must be nonnegative");
  TransientSystem sys = build_system(m, policy);
  std::vector<double> curve;
  curve.reserve(t_max + 1);
  Eigen::VectorXd v = sys.eta;
  for (int t = 0; t <= t_max; ++t) {
    curve.push_back(v.size() == 0 ? 0.0 : v.sum());
    if (t < t_max && v.size() != 0) v = sys.p.transpose() * v;
  }
  return curve;
}

double tail_sum(const Model& m, const StationaryPolicy& policy, int n,
                const OccupationOptions& opts) {
  if (n < 0) throw BadParameter("n must be nonnegative");
  TransientSystem sys = build_system(m, policy);
  if (sys.states.empty()) return 0.0;
  Eigen::VectorXd w = remaining_time_vector(sys, opts);
  Eigen::VectorXd v = sys.eta;
  for (int t = 0; t < n; ++t) v = sys.p.transpose() * v;
  return v.dot(w);
}

std::vector<double> uniform_absorption_profile(const Model& m,
                                               const std::vector<StationaryPolicy>& family,
                                               int n_max, const OccupationOptions& opts) {
  if (family.empty()) throw EmptyFamily("uniform absorption profile of an empty policy family");
  if (n_max < 0) throw BadParameter("n_max must be nonnegative");
  std::vector<double> profile(n_max + 1, 0.0);
  for (const auto& policy : family) {
    TransientSystem sys = build_system(m, policy);
    if (sys.states.empty()) continue;
    Eigen::VectorXd w = remaining_time_vector(sys, opts);
    Eigen::VectorXd v = sys.eta;
    for (int n = 0; n <= n_max; ++n) {
      profile[n] = std::max(profile[n], v.dot(w));
      if (n < n_max) v = sys.p.transpose() * v;
    }
  }
  return profile;
}

std::vector<std::vector<double>> escaping_mass_by_policy(
    const Model& m, const std::vector<StationaryPolicy>& family,
    const std::vector<StateSet>& gammas, const OccupationOptions& opts) {
  if (family.empty()) throw EmptyFamily("escaping mass of an empty policy family");
  for (std::size_t i = 1; i < gammas.size(); ++i) {
    if (!gammas[i].subset_of(gammas[i - 1])) {
      throw NotDecreasing("state sets must be nested decreasing");
    }
  }
  std::vector<std::vector<double>> masses(family.size(),
                                          std::vector<double>(gammas.size(), 0.0));
  for (std::size_t k = 0; k < family.size(); ++k) {
    StateMeasure marginal = occupation_measure(m, family[k], opts).marginal_x();
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      double sum = 0.0;
      for (int x : gammas[i].members()) sum += marginal.at(x);
      masses[k][i] = sum;
    }
  }
  return masses;
}

std::vector<double> escaping_mass(const Model& m, const std::vector<StationaryPolicy>& family,
                                  const std::vector<StateSet>& gammas,
                                  const OccupationOptions& opts) {
  auto by_policy = escaping_mass_by_policy(m, family, gammas, opts);
  std::vector<double> out(gammas.size(), 0.0);
  for (const auto& row : by_policy) {
    for (std::size_t i = 0; i < row.size(); ++i) out[i] = std::max(out[i], row[i]);
  }
  return out;
}

StationaryPolicy reference_policy(const Model& m) {
  std::vector<std::vector<double>> choice(m.num_states());
  for (int x = 0; x < m.num_states(); ++x) {
    int na = m.num_actions(x);
    choice[x].resize(na);
    double norm = 1.0 - std::ldexp(1.0, -na);  // 1 - 2^-na
    for (int a = 0; a < na; ++a) choice[x][a] = std::ldexp(1.0, -(a + 1)) / norm;
  }
  return StationaryPolicy::validated(m, std::move(choice));
}

StateMeasure reference_measure(const Model& m, const ReferenceMeasureConfig& cfg) {
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) throw BadParameter("beta must lie in (0,1)");
  if (!(cfg.tol > 0.0)) throw BadParameter("truncation tolerance must be positive");

  const auto kernel = induced_kernel(m, reference_policy(m));
  // Enough terms to push the remaining geometric weight below tol, and at
  // least enough to touch every reachable state once.
  long k_tol = static_cast<long>(std::ceil(std::log(cfg.tol) / std::log(cfg.beta)));
  long k_max = std::max<long>(k_tol, reachable_depth(m, m.support_of_initial()) + 1);

  std::vector<double> v(m.initial());
  std::vector<double> lam(m.num_states(), 0.0);
  double weight = 1.0 - cfg.beta;
  for (long k = 0; k <= k_max; ++k) {
    for (int x = 0; x < m.num_states(); ++x) lam[x] += weight * v[x];
    weight *= cfg.beta;
    if (k == k_max) break;
    std::vector<double> next(m.num_states(), 0.0);
    for (int x = 0; x < m.num_states(); ++x) {
      if (v[x] == 0.0) continue;
      for (const auto& [to, p] : kernel[x]) next[to] += v[x] * p;
    }
    v = std::move(next);
  }
  double total = 0.0;
  for (double x : lam) total += x;
  StateMeasure out;
  for (int x = 0; x < m.num_states(); ++x) {
    if (lam[x] > 0.0) out.set(x, lam[x] / total);
  }
  return out;
}

AbsorptionReport absorption_report(const Model& m, const StationaryPolicy& policy, int t_max,
                                   const OccupationOptions& opts) {
  if (t_max < 0) throw BadParameter("t_max must be nonnegative");
  TransientSystem sys = build_system(m, policy);
  AbsorptionReport report;
  report.survival.reserve(t_max + 1);
  report.tail.reserve(t_max + 1);
  if (sys.states.empty()) {
    report.survival.assign(t_max + 1, 0.0);
    report.tail.assign(t_max + 1, 0.0);
    return report;
  }
  Eigen::VectorXd w = remaining_time_vector(sys, opts);
  Eigen::VectorXd v = sys.eta;
  for (int t = 0; t <= t_max; ++t) {
    report.survival.push_back(v.sum());
    report.tail.push_back(v.dot(w));
    if (t < t_max) v = sys.p.transpose() * v;
  }
  report.expected_hitting_time = report.tail.front();
  return report;
}

}  // namespace absorb
