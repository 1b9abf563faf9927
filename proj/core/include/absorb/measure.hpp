#pragma once

#include <map>
#include <utility>

#include "absorb/model.hpp"

namespace absorb {

// Sparse nonnegative measure on states. Entries may dip to -kNegMassTol
// from round-off; serialization clamps those to zero.
class StateMeasure {
 public:
  using Map = std::map<int, double>;

  void set(int x, double v);
  void add(int x, double v);
  double at(int x) const;
  const Map& entries() const { return mass_; }
  double total() const;
  StateSet support(double eps = kSupportEps) const;

  // l1 distance to another state measure.
  double l1_distance(const StateMeasure& other) const;

 private:
  Map mass_;
};

// Sparse nonnegative measure on state-action pairs.
class StateActionMeasure {
 public:
  using Key = std::pair<int, int>;
  using Map = std::map<Key, double>;

  void set(int x, int a, double v);
  void add(int x, int a, double v);
  double at(int x, int a) const;
  const Map& entries() const { return mass_; }
  double total() const;

  StateMeasure marginal_x() const;
  StateActionMeasure scaled(double c) const;
  StateActionMeasure plus(const StateActionMeasure& other) const;
  // Coordinatewise difference; dips below -clamp_tol throw NumericalError,
  // smaller dips are clamped to zero.
  StateActionMeasure minus(const StateActionMeasure& other, double clamp_tol = 1e-9) const;

  // True when the support is contained in the feasible pairs of `m` (and
  // action indices are in range).
  bool supported_on_feasible_pairs(const Model& m) const;

 private:
  Map mass_;
};

struct Disintegration {
  StateMeasure marginal;
  StationaryPolicy policy;
};

// Factors mu into its state marginal and a stationary policy with
// sigma(a|x) = mu(x,a) / mu^X(x). States with zero marginal get the
// uniform distribution over their available actions. Throws
// SupportViolation if mu puts mass outside the feasible pairs.
Disintegration disintegrate(const StateActionMeasure& mu, const Model& m);

}  // namespace absorb
