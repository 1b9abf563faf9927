#pragma once

// Model builders shared across the test suites.

#include <string>
#include <vector>

#include "absorb/io.hpp"
#include "absorb/model.hpp"
#include "absorb/rng.hpp"

namespace testsupport {

// One transient state that escapes into the absorbing state with
// probability p per step; hitting time is Geometric(p), E[T] = 1/p.
inline absorb::Model geo_model(double p) {
  absorb::ModelData data;
  data.states = {"s", "d"};
  data.actions["s"] = {"a"};
  data.actions["d"] = {"a"};
  data.kernel.push_back({"s", "a", "d", p});
  if (p < 1.0) data.kernel.push_back({"s", "a", "s", 1.0 - p});
  data.kernel.push_back({"d", "a", "d", 1.0});
  data.initial["s"] = 1.0;
  data.absorbing = {"d"};
  return absorb::validate_model(data);
}

// One-step model: x0 enters the absorbing state deterministically.
inline absorb::Model triv_model() { return geo_model(1.0); }

// Two actions at s: a pays 1 and absorbs, b pays 0 and absorbs with
// probability 1/2. The planner examples live on this model.
inline absorb::Model two_action_model() {
  absorb::ModelData data;
  data.states = {"s", "d"};
  data.actions["s"] = {"a", "b"};
  data.actions["d"] = {"t"};
  data.kernel.push_back({"s", "a", "d", 1.0});
  data.kernel.push_back({"s", "b", "s", 0.5});
  data.kernel.push_back({"s", "b", "d", 0.5});
  data.kernel.push_back({"d", "t", "d", 1.0});
  data.initial["s"] = 1.0;
  data.absorbing = {"d"};
  return absorb::validate_model(data);
}

// s drains straight into d; A and B form an unreachable deterministic
// 2-cycle, so invariant measures on {A,B} oscillate under iteration.
inline absorb::Model cycle_model() {
  absorb::ModelData data;
  data.states = {"s", "A", "B", "d"};
  for (const auto& st : data.states) data.actions[st] = {"a"};
  data.kernel.push_back({"s", "a", "d", 1.0});
  data.kernel.push_back({"A", "a", "B", 1.0});
  data.kernel.push_back({"B", "a", "A", 1.0});
  data.kernel.push_back({"d", "a", "d", 1.0});
  data.initial["s"] = 1.0;
  data.absorbing = {"d"};
  return absorb::validate_model(data);
}

// The descend-or-walk policy on the tree fixture: descend (action c) at
// the spine states (i,0) for i < t, walk (action s) everywhere else.
inline absorb::StationaryPolicy tree_gamma(const absorb::Model& tree, int t) {
  std::vector<int> action_of(tree.num_states(), 0);
  for (int x = 0; x < tree.num_states(); ++x) {
    const std::string& name = tree.state_name(x);
    if (name == "xbar") {
      action_of[x] = 0;
      continue;
    }
    auto sep = name.find('_');
    int i = std::stoi(name.substr(0, sep));
    int j = std::stoi(name.substr(sep + 1));
    if (j == 0 && tree.num_actions(x) == 2 && i < t) {
      action_of[x] = 0;  // c
    } else {
      action_of[x] = tree.num_actions(x) - 1;  // s
    }
  }
  return absorb::StationaryPolicy::pure(tree, action_of);
}

// The nested sets {(i,j): i >= n, 1 <= j <= 2^i - 1} for n = 1..n_max.
inline std::vector<absorb::StateSet> tree_gamma_sets(const absorb::Model& tree, int n_max) {
  std::vector<absorb::StateSet> sets;
  for (int n = 1; n <= n_max; ++n) {
    std::vector<int> members;
    for (int x = 0; x < tree.num_states(); ++x) {
      const std::string& name = tree.state_name(x);
      if (name == "xbar") continue;
      auto sep = name.find('_');
      int i = std::stoi(name.substr(0, sep));
      int j = std::stoi(name.substr(sep + 1));
      if (i >= n && j >= 1) members.push_back(x);
    }
    sets.push_back(absorb::StateSet::of(members));
  }
  return sets;
}

// --- seeded random generation (bit-stable across platforms) ---

inline long rand_int(absorb::SplitMix64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Random absorbing-from-eta model. The "main" block always leaks at least
// 5% per row into the absorbing state, so every policy absorbs from the
// initial distribution. An optional "side" block is unreachable from eta
// and may or may not contain closed classes; that is where invariant
// directions live when they exist.
inline absorb::Model random_model(absorb::SplitMix64& rng, int max_states = 8,
                                  int max_actions = 3) {
  int n_main = static_cast<int>(rand_int(rng, 1, std::max(1, max_states - 3)));
  int n_side = rng.next_unit() < 0.55
                   ? static_cast<int>(rand_int(rng, 1, std::max(1, max_states - n_main - 1)))
                   : 0;
  absorb::ModelData data;
  std::vector<std::string> main_states, side_states;
  for (int i = 0; i < n_main; ++i) main_states.push_back("m" + std::to_string(i));
  for (int i = 0; i < n_side; ++i) side_states.push_back("u" + std::to_string(i));
  data.states = main_states;
  data.states.insert(data.states.end(), side_states.begin(), side_states.end());
  data.states.push_back("delta");

  for (const auto& st : data.states) {
    int na = static_cast<int>(rand_int(rng, 1, max_actions));
    for (int a = 0; a < na; ++a) data.actions[st].push_back("a" + std::to_string(a));
  }
  data.actions["delta"] = {"a0"};
  data.kernel.push_back({"delta", "a0", "delta", 1.0});

  auto random_row = [&](const std::string& from, const std::string& action,
                        const std::vector<std::string>& targets, double delta_floor) {
    int fanout = static_cast<int>(rand_int(rng, 1, static_cast<long>(targets.size())));
    std::vector<double> weights(targets.size(), 0.0);
    double total = 0.0;
    for (int k = 0; k < fanout; ++k) {
      int t = static_cast<int>(rand_int(rng, 0, static_cast<long>(targets.size()) - 1));
      double w = 0.05 + rng.next_unit();
      weights[t] += w;
      total += w;
    }
    double scale = (1.0 - delta_floor) / total;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (weights[t] > 0.0) data.kernel.push_back({from, action, targets[t], weights[t] * scale});
    }
    if (delta_floor > 0.0) data.kernel.push_back({from, action, "delta", delta_floor});
  };

  // Main rows target main states (plus the guaranteed leak into delta).
  for (const auto& st : main_states) {
    for (const auto& act : data.actions[st]) {
      double leak = 0.05 + 0.6 * rng.next_unit();
      random_row(st, act, main_states, leak);
    }
  }
  // Side rows: sometimes confined to the side block (closed classes can
  // form), sometimes leaking into delta or the main block.
  for (const auto& st : side_states) {
    for (const auto& act : data.actions[st]) {
      if (rng.next_unit() < 0.6) {
        random_row(st, act, side_states, 0.0);
      } else if (rng.next_unit() < 0.5) {
        random_row(st, act, side_states, 0.1 + 0.5 * rng.next_unit());
      } else {
        std::vector<std::string> mixed = side_states;
        mixed.insert(mixed.end(), main_states.begin(), main_states.end());
        random_row(st, act, mixed, 0.2 * rng.next_unit());
      }
    }
  }

  // Initial distribution over a random nonempty subset of the main block.
  double total = 0.0;
  std::vector<double> eta(main_states.size(), 0.0);
  for (std::size_t i = 0; i < main_states.size(); ++i) {
    if (rng.next_unit() < 0.7) eta[i] = 0.1 + rng.next_unit();
  }
  for (double w : eta) total += w;
  if (total == 0.0) {
    eta[0] = 1.0;
    total = 1.0;
  }
  for (std::size_t i = 0; i < main_states.size(); ++i) {
    if (eta[i] > 0.0) data.initial[main_states[i]] = eta[i] / total;
  }
  data.absorbing = {"delta"};
  return absorb::validate_model(data);
}

inline absorb::StationaryPolicy random_policy(absorb::SplitMix64& rng, const absorb::Model& m) {
  std::vector<std::vector<double>> choice(m.num_states());
  for (int x = 0; x < m.num_states(); ++x) {
    choice[x].resize(m.num_actions(x));
    double total = 0.0;
    for (double& w : choice[x]) total += (w = 0.05 + rng.next_unit());
    for (double& w : choice[x]) w /= total;
  }
  return absorb::StationaryPolicy::validated(m, std::move(choice));
}

}  // namespace testsupport
