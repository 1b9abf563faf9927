#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "absorb/measure.hpp"
#include "absorb/model.hpp"
#include "absorb/planner.hpp"

namespace absorb {

// Model documents: {"states": [...], "actions": {state: [...]},
// "kernel": [{from, action, to, p}], "initial": {state: mass},
// "absorbing": [...]}. Duplicate kernel records are summed.
ModelData parse_model_data(const std::string& text);
Model parse_model(const std::string& text);
Model load_model(const std::filesystem::path& path);
std::string serialize_model(const Model& m);

// Policy documents: {state: {action: probability}}; every state must appear.
StationaryPolicy parse_policy(const std::string& text, const Model& m);
StationaryPolicy load_policy(const std::filesystem::path& path, const Model& m);
std::string serialize_policy(const StationaryPolicy& policy, const Model& m);

// Measure documents: [{state, action, mass}].
StateActionMeasure parse_measure(const std::string& text, const Model& m);
StateActionMeasure load_measure(const std::filesystem::path& path, const Model& m);
std::string serialize_measure(const StateActionMeasure& mu, const Model& m);
std::string serialize_state_measure(const StateMeasure& nu, const Model& m);

// State-set documents: array of arrays of state names (outermost first).
std::vector<StateSet> parse_state_sets(const std::string& text, const Model& m);
std::vector<StateSet> load_state_sets(const std::filesystem::path& path, const Model& m);

// Pair-coefficient documents (costs, constraint rows): {state: {action: value}}.
PairCoeffs parse_pair_coeffs(const std::string& text, const Model& m);
// Constraint documents: one object or an array of objects
// {coeffs: {state: {action: value}}, bound: number, sense: "<="|">="|"="}.
std::vector<LinearConstraint> parse_constraints(const std::string& text, const Model& m);
std::vector<LinearConstraint> load_constraints(const std::filesystem::path& path, const Model& m);

// Built-in example models.
//
// phantom(N, beta_model): a one-action chain 1 <- i -> i+1 on {1..N} that
// drains into the absorbing state 0, plus a two-state cycle {-1,-2} that
// is invariant but unreachable; mass leaving state N is redirected into
// the absorbing state so the truncation stays absorbing. Requires N >= 3.
Model fixture_phantom(int n, double beta_model);
// tree(L): binary-coin descent over levels (i,0), i <= L, with columns
// (i,1..2^i-1) walked deterministically into the absorbing state xbar;
// the descend action is dropped at level L. Requires L >= 1.
Model fixture_tree(int levels);

}  // namespace absorb
