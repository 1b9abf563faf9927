#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absorb/errors.hpp"

namespace absorb {

// Tolerance for row masses / distributions summing to one.
inline constexpr double kRowMassTol = 1e-9;
// Measures may carry round-off dips down to this value; anything below is an error.
inline constexpr double kNegMassTol = 1e-12;
// A state belongs to the support of a measure if its mass exceeds this.
inline constexpr double kSupportEps = 1e-12;

// Sparse probability row: (target state, mass), sorted by target, zero-free.
using SparseRow = std::vector<std::pair<int, double>>;

// Raw, unvalidated model description as it appears in model files.
struct ModelData {
  struct KernelEntry {
    std::string from;
    std::string action;
    std::string to;
    double p = 0.0;
  };

  std::vector<std::string> states;
  std::map<std::string, std::vector<std::string>> actions;
  std::vector<KernelEntry> kernel;
  std::map<std::string, double> initial;
  std::vector<std::string> absorbing;
};

class StateSet;

// A validated absorbing control model. Immutable after construction;
// safe to share read-only across threads. States and actions are strings
// externally and dense indices internally; all iteration follows
// declaration order, which makes every computation deterministic.
class Model {
 public:
  int num_states() const { return static_cast<int>(state_names_.size()); }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::string& state_name(int x) const { return state_names_[x]; }

  // Index of a declared state; -1 if unknown.
  int find_state(std::string_view name) const;
  // Same, but throws ParseError with the given context on unknown names.
  int state_index(std::string_view name, std::string_view context = "") const;

  int num_actions(int x) const { return static_cast<int>(actions_[x].size()); }
  const std::vector<std::string>& action_names(int x) const { return actions_[x]; }
  int find_action(int x, std::string_view name) const;

  // Transition distribution of the pair (x, a).
  const SparseRow& row(int x, int a) const { return rows_[pair_index(x, a)]; }

  const std::vector<double>& initial() const { return initial_; }
  bool is_absorbing(int x) const { return absorbing_mask_[x]; }
  const std::vector<int>& absorbing_states() const { return absorbing_; }

  // Dense enumeration of the feasible pairs K.
  int num_pairs() const { return static_cast<int>(pairs_.size()); }
  int pair_index(int x, int a) const { return pair_base_[x] + a; }
  std::pair<int, int> pair_at(int k) const { return pairs_[k]; }

  // Copy of this model with a different initial distribution (dense over
  // states, must sum to one within kRowMassTol).
  Model with_initial(const std::vector<double>& eta) const;

  StateSet support_of_initial() const;

 private:
  friend Model validate_model(const ModelData& raw);

  std::vector<std::string> state_names_;
  std::map<std::string, int, std::less<>> state_index_;
  std::vector<std::vector<std::string>> actions_;
  std::vector<int> pair_base_;                // state -> first pair index
  std::vector<std::pair<int, int>> pairs_;    // pair index -> (state, action)
  std::vector<SparseRow> rows_;               // per pair
  std::vector<double> initial_;
  std::vector<bool> absorbing_mask_;
  std::vector<int> absorbing_;
};

// Checks every model invariant (row masses, closedness of the absorbing
// set, initial distribution, declaration consistency) and builds the
// indexed representation. Throws InvalidModel.
Model validate_model(const ModelData& raw);

// An ordered set of states (dense indices into a model).
class StateSet {
 public:
  StateSet() = default;
  static StateSet of(std::vector<int> members);  // sorts and dedups
  static StateSet from_names(const Model& m, const std::vector<std::string>& names);

  bool contains(int x) const;
  bool subset_of(const StateSet& other) const;
  bool empty() const { return members_.empty(); }
  int size() const { return static_cast<int>(members_.size()); }
  const std::vector<int>& members() const { return members_; }

  friend bool operator==(const StateSet&, const StateSet&) = default;

 private:
  std::vector<int> members_;  // sorted, unique
};

// A stationary randomized policy bound to the model it was validated
// against: probs[x] is aligned with model.action_names(x).
class StationaryPolicy {
 public:
  static StationaryPolicy validated(const Model& m, std::vector<std::vector<double>> choice);
  static StationaryPolicy uniform(const Model& m);
  // Deterministic policy: action_of[x] is an index into action_names(x).
  static StationaryPolicy pure(const Model& m, const std::vector<int>& action_of);

  const std::vector<double>& at(int x) const { return choice_[x]; }
  int num_states() const { return static_cast<int>(choice_.size()); }

 private:
  std::vector<std::vector<double>> choice_;
};

// The state kernel K_sigma(y|x) = sum_a sigma(a|x) Q(y|x,a); rows are
// row-stochastic within kRowMassTol.
std::vector<SparseRow> induced_kernel(const Model& m, const StationaryPolicy& policy);

// Least superset of `source` closed under the support of the kernel:
// x in set, a in A(x), Q(y|x,a) > 0 implies y in set.
StateSet reachable_states(const Model& m, const StateSet& source);

// Number of breadth-first levels needed to exhaust the reachable closure.
int reachable_depth(const Model& m, const StateSet& source);

}  // namespace absorb
