#include "absorb/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

namespace absorb {

const char* to_string(ModelFault fault) {
  switch (fault) {
    case ModelFault::RowMassViolation: return "RowMassViolation";
    case ModelFault::AbsorbingSetNotClosed: return "AbsorbingSetNotClosed";
    case ModelFault::UnknownState: return "UnknownState";
    case ModelFault::EmptyActionSet: return "EmptyActionSet";
    case ModelFault::BadInitialDistribution: return "BadInitialDistribution";
  }
  return "?";
}

int Model::find_state(std::string_view name) const {
  auto it = state_index_.find(name);
  return it == state_index_.end() ? -1 : it->second;
}

int Model::state_index(std::string_view name, std::string_view context) const {
  int x = find_state(name);
  if (x < 0) {
    std::ostringstream os;
    os << "unknown state '" << name << "'";
    if (!context.empty()) os << " in " << context;
    throw ParseError(os.str());
  }
  return x;
}

int Model::find_action(int x, std::string_view name) const {
  const auto& names = actions_[x];
  for (int a = 0; a < static_cast<int>(names.size()); ++a) {
    if (names[a] == name) return a;
  }
  return -1;
}

Model Model::with_initial(const std::vector<double>& eta) const {
  if (static_cast<int>(eta.size()) != num_states()) {
    throw InvalidModel(ModelFault::BadInitialDistribution,
                       "initial distribution has wrong dimension");
  }
  double sum = 0.0;
  for (double v : eta) {
    if (v < -kNegMassTol || !std::isfinite(v)) {
      throw InvalidModel(ModelFault::BadInitialDistribution, "negative or non-finite mass");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowMassTol) {
    throw InvalidModel(ModelFault::BadInitialDistribution, "masses do not sum to one");
  }
  Model copy = *this;
  copy.initial_ = eta;
  for (double& v : copy.initial_) v = std::max(v, 0.0);
  return copy;
}

StateSet Model::support_of_initial() const {
  std::vector<int> supp;
  for (int x = 0; x < num_states(); ++x) {
    if (initial_[x] > kSupportEps) supp.push_back(x);
  }
  return StateSet::of(std::move(supp));
}

Model validate_model(const ModelData& raw) {
  Model m;
  m.state_names_ = raw.states;
  for (int i = 0; i < static_cast<int>(raw.states.size()); ++i) {
    auto [it, inserted] = m.state_index_.emplace(raw.states[i], i);
    if (!inserted) {
      throw InvalidModel(ModelFault::UnknownState, "state '" + raw.states[i] + "' declared twice");
    }
  }
  int n = m.num_states();
  if (n == 0) throw InvalidModel(ModelFault::UnknownState, "model declares no states");

  // Action sets, in declaration order of the states.
  m.actions_.resize(n);
  for (const auto& [state, acts] : raw.actions) {
    int x = m.find_state(state);
    if (x < 0) {
      throw InvalidModel(ModelFault::UnknownState, "actions declared for unknown state '" + state + "'");
    }
    if (acts.empty()) {
      throw InvalidModel(ModelFault::EmptyActionSet, "state '" + state + "' has no actions");
    }
    for (std::size_t i = 0; i < acts.size(); ++i) {
      for (std::size_t j = i + 1; j < acts.size(); ++j) {
        if (acts[i] == acts[j]) {
          throw InvalidModel(ModelFault::EmptyActionSet,
                             "duplicate action '" + acts[i] + "' at state '" + state + "'");
        }
      }
    }
    m.actions_[x] = acts;
  }
  for (int x = 0; x < n; ++x) {
    if (m.actions_[x].empty()) {
      throw InvalidModel(ModelFault::EmptyActionSet,
                         "state '" + m.state_names_[x] + "' has no actions");
    }
  }

  m.pair_base_.resize(n);
  int pair_count = 0;
  for (int x = 0; x < n; ++x) {
    m.pair_base_[x] = pair_count;
    for (int a = 0; a < m.num_actions(x); ++a) m.pairs_.emplace_back(x, a);
    pair_count += m.num_actions(x);
  }
  m.rows_.resize(pair_count);

  // Absorbing set.
  m.absorbing_mask_.assign(n, false);
  for (const auto& name : raw.absorbing) {
    int x = m.find_state(name);
    if (x < 0) {
      throw InvalidModel(ModelFault::UnknownState, "absorbing set names unknown state '" + name + "'");
    }
    m.absorbing_mask_[x] = true;
  }
  for (int x = 0; x < n; ++x) {
    if (m.absorbing_mask_[x]) m.absorbing_.push_back(x);
  }

  // Kernel rows: accumulate duplicates, then sort by target.
  std::vector<std::map<int, double>> accum(pair_count);
  for (const auto& e : raw.kernel) {
    int from = m.find_state(e.from);
    if (from < 0) {
      throw InvalidModel(ModelFault::UnknownState, "kernel row from unknown state '" + e.from + "'");
    }
    int a = m.find_action(from, e.action);
    if (a < 0) {
      throw InvalidModel(ModelFault::UnknownState, "kernel row at ('" + e.from + "', '" + e.action +
                                                       "') references an action not in A(" + e.from + ")");
    }
    int to = m.find_state(e.to);
    if (to < 0) {
      throw InvalidModel(ModelFault::UnknownState, "kernel row targets unknown state '" + e.to + "'");
    }
    if (!std::isfinite(e.p) || e.p < -kNegMassTol) {
      throw InvalidModel(ModelFault::RowMassViolation,
                         "negative or non-finite probability at ('" + e.from + "', '" + e.action + "')");
    }
    if (e.p > 0.0) accum[m.pair_index(from, a)][to] += e.p;
  }
  for (int k = 0; k < pair_count; ++k) {
    auto [x, a] = m.pairs_[k];
    double sum = 0.0;
    for (const auto& [to, p] : accum[k]) {
      m.rows_[k].emplace_back(to, p);
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowMassTol) {
      std::ostringstream os;
      os << "row at ('" << m.state_names_[x] << "', '" << m.actions_[x][a] << "') has mass " << sum;
      throw InvalidModel(ModelFault::RowMassViolation, os.str());
    }
    if (m.absorbing_mask_[x]) {
      double into_delta = 0.0;
      for (const auto& [to, p] : m.rows_[k]) {
        if (m.absorbing_mask_[to]) into_delta += p;
      }
      if (std::abs(into_delta - 1.0) > kRowMassTol) {
        std::ostringstream os;
        os << "absorbing state '" << m.state_names_[x] << "' leaks mass " << (1.0 - into_delta)
           << " out of the absorbing set under action '" << m.actions_[x][a] << "'";
        throw InvalidModel(ModelFault::AbsorbingSetNotClosed, os.str());
      }
    }
  }

  // Initial distribution.
  m.initial_.assign(n, 0.0);
  double eta_sum = 0.0;
  for (const auto& [state, mass] : raw.initial) {
    int x = m.find_state(state);
    if (x < 0) {
      throw InvalidModel(ModelFault::UnknownState, "initial mass on unknown state '" + state + "'");
    }
    if (!std::isfinite(mass) || mass < -kNegMassTol) {
      throw InvalidModel(ModelFault::BadInitialDistribution,
                         "negative or non-finite initial mass at '" + state + "'");
    }
    m.initial_[x] += std::max(mass, 0.0);
    eta_sum += mass;
  }
  if (std::abs(eta_sum - 1.0) > kRowMassTol) {
    std::ostringstream os;
    os << "initial distribution has mass " << eta_sum;
    throw InvalidModel(ModelFault::BadInitialDistribution, os.str());
  }

  return m;
}

StateSet StateSet::of(std::vector<int> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  StateSet s;
  s.members_ = std::move(members);
  return s;
}

StateSet StateSet::from_names(const Model& m, const std::vector<std::string>& names) {
  std::vector<int> members;
  members.reserve(names.size());
  for (const auto& name : names) members.push_back(m.state_index(name, "state set"));
  return of(std::move(members));
}

bool StateSet::contains(int x) const {
  return std::binary_search(members_.begin(), members_.end(), x);
}

bool StateSet::subset_of(const StateSet& other) const {
  return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                       members_.end());
}

StationaryPolicy StationaryPolicy::validated(const Model& m,
                                             std::vector<std::vector<double>> choice) {
  if (static_cast<int>(choice.size()) != m.num_states()) {
    throw PolicyMismatch("policy covers " + std::to_string(choice.size()) + " states, model has " +
                         std::to_string(m.num_states()));
  }
  for (int x = 0; x < m.num_states(); ++x) {
    auto& row = choice[x];
    if (static_cast<int>(row.size()) != m.num_actions(x)) {
      throw PolicyMismatch("policy row at '" + m.state_name(x) + "' has wrong arity");
    }
    double sum = 0.0;
    for (double v : row) {
      if (!std::isfinite(v) || v < -kNegMassTol) {
        throw PolicyMismatch("negative or non-finite probability at '" + m.state_name(x) + "'");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowMassTol) {
      throw PolicyMismatch("policy row at '" + m.state_name(x) + "' has mass " +
                           std::to_string(sum));
    }
    for (double& v : row) v = std::max(v, 0.0);
  }
  StationaryPolicy p;
  p.choice_ = std::move(choice);
  return p;
}

StationaryPolicy StationaryPolicy::uniform(const Model& m) {
  std::vector<std::vector<double>> choice(m.num_states());
  for (int x = 0; x < m.num_states(); ++x) {
    choice[x].assign(m.num_actions(x), 1.0 / m.num_actions(x));
  }
  StationaryPolicy p;
  p.choice_ = std::move(choice);
  return p;
}

StationaryPolicy StationaryPolicy::pure(const Model& m, const std::vector<int>& action_of) {
  if (static_cast<int>(action_of.size()) != m.num_states()) {
    throw PolicyMismatch("action assignment covers the wrong number of states");
  }
  std::vector<std::vector<double>> choice(m.num_states());
  for (int x = 0; x < m.num_states(); ++x) {
    int a = action_of[x];
    if (a < 0 || a >= m.num_actions(x)) {
      throw PolicyMismatch("action index " + std::to_string(a) + " out of range at '" +
                           m.state_name(x) + "'");
    }
    choice[x].assign(m.num_actions(x), 0.0);
    choice[x][a] = 1.0;
  }
  StationaryPolicy p;
  p.choice_ = std::move(choice);
  return p;
}

std::vector<SparseRow> induced_kernel(const Model& m, const StationaryPolicy& policy) {
  if (policy.num_states() != m.num_states()) {
    throw PolicyMismatch("policy is bound to a different model");
  }
  std::vector<SparseRow> rows(m.num_states());
  std::map<int, double> merged;
  for (int x = 0; x < m.num_states(); ++x) {
    merged.clear();
    const auto& probs = policy.at(x);
    for (int a = 0; a < m.num_actions(x); ++a) {
      if (probs[a] <= 0.0) continue;
      for (const auto& [to, p] : m.row(x, a)) merged[to] += probs[a] * p;
    }
    rows[x].assign(merged.begin(), merged.end());
  }
  return rows;
}

StateSet reachable_states(const Model& m, const StateSet& source) {
  std::vector<bool> seen(m.num_states(), false);
  std::deque<int> frontier;
  for (int x : source.members()) {
    if (x < 0 || x >= m.num_states()) {
      throw BadParameter("reachability source contains an undeclared state index");
    }
    seen[x] = true;
    frontier.push_back(x);
  }
  while (!frontier.empty()) {
    int x = frontier.front();
    frontier.pop_front();
    for (int a = 0; a < m.num_actions(x); ++a) {
      for (const auto& [to, p] : m.row(x, a)) {
        if (p > 0.0 && !seen[to]) {
          seen[to] = true;
          frontier.push_back(to);
        }
      }
    }
  }
  std::vector<int> members;
  for (int x = 0; x < m.num_states(); ++x) {
    if (seen[x]) members.push_back(x);
  }
  return StateSet::of(std::move(members));
}

int reachable_depth(const Model& m, const StateSet& source) {
  std::vector<bool> seen(m.num_states(), false);
  std::vector<int> frontier;
  for (int x : source.members()) {
    if (!seen[x]) {
      seen[x] = true;
      frontier.push_back(x);
    }
  }
  int depth = 0;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int x : frontier) {
      for (int a = 0; a < m.num_actions(x); ++a) {
        for (const auto& [to, p] : m.row(x, a)) {
          if (p > 0.0 && !seen[to]) {
            seen[to] = true;
            next.push_back(to);
          }
        }
      }
    }
    if (!next.empty()) ++depth;
    frontier = std::move(next);
  }
  return depth;
}

}  // namespace absorb
