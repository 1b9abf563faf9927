#include "absorb/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace absorb {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    // Re-parse with exceptions to recover the byte position.
    try {
      json rethrown = json::parse(text);
      (void)rethrown;
    } catch (const json::parse_error& e) {
      throw ParseError(std::string(what) + ": " + e.what());
    }
    throw ParseError(std::string(what) + ": malformed JSON");
  }
  return doc;
}

double number_at(const json& value, const std::string& where) {
  if (!value.is_number()) throw ParseError(where + ": expected a number");
  return value.get<double>();
}

double probability_at(const json& value, const std::string& where) {
  double p = number_at(value, where);
  if (!std::isfinite(p) || p < 0.0) {
    throw ParseError(where + ": probabilities must be finite and nonnegative");
  }
  return p;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

ModelData parse_model_data(const std::string& text) {
  json doc = parse_json(text, "model");
  if (!doc.is_object()) throw ParseError("model: top level must be an object");
  ModelData data;

  if (!doc.contains("states") || !doc["states"].is_array()) {
    throw ParseError("model: missing 'states' array");
  }
  for (const auto& s : doc["states"]) {
    if (!s.is_string()) throw ParseError("model: 'states' entries must be strings");
    data.states.push_back(s.get<std::string>());
  }

  if (!doc.contains("actions") || !doc["actions"].is_object()) {
    throw ParseError("model: missing 'actions' object");
  }
  for (const auto& [state, acts] : doc["actions"].items()) {
    if (!acts.is_array()) throw ParseError("model: actions['" + state + "'] must be an array");
    auto& list = data.actions[state];
    for (const auto& a : acts) {
      if (!a.is_string()) throw ParseError("model: actions['" + state + "'] entries must be strings");
      list.push_back(a.get<std::string>());
    }
  }

  if (!doc.contains("kernel") || !doc["kernel"].is_array()) {
    throw ParseError("model: missing 'kernel' array");
  }
  int index = 0;
  for (const auto& rec : doc["kernel"]) {
    std::string where = "model: kernel[" + std::to_string(index++) + "]";
    if (!rec.is_object()) throw ParseError(where + " must be an object");
    for (const char* field : {"from", "action", "to"}) {
      if (!rec.contains(field) || !rec[field].is_string()) {
        throw ParseError(where + " needs a string field '" + field + "'");
      }
    }
    if (!rec.contains("p")) throw ParseError(where + " needs a field 'p'");
    data.kernel.push_back({rec["from"].get<std::string>(), rec["action"].get<std::string>(),
                           rec["to"].get<std::string>(), probability_at(rec["p"], where + ".p")});
  }

  if (!doc.contains("initial") || !doc["initial"].is_object()) {
    throw ParseError("model: missing 'initial' object");
  }
  for (const auto& [state, mass] : doc["initial"].items()) {
    data.initial[state] = probability_at(mass, "model: initial['" + state + "']");
  }

  if (!doc.contains("absorbing") || !doc["absorbing"].is_array()) {
    throw ParseError("model: missing 'absorbing' array");
  }
  for (const auto& s : doc["absorbing"]) {
    if (!s.is_string()) throw ParseError("model: 'absorbing' entries must be strings");
    data.absorbing.push_back(s.get<std::string>());
  }
  return data;
}

Model parse_model(const std::string& text) {
  ModelData data = parse_model_data(text);
  try {
    return validate_model(data);
  } catch (const InvalidModel& e) {
    // Dangling references are a document defect, not a model defect.
    if (e.fault == ModelFault::UnknownState) throw ParseError(e.what());
    throw;
  }
}

Model load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

std::string serialize_model(const Model& m) {
  json doc;
  doc["states"] = m.state_names();
  json actions = json::object();
  json kernel = json::array();
  for (int x = 0; x < m.num_states(); ++x) {
    actions[m.state_name(x)] = m.action_names(x);
    for (int a = 0; a < m.num_actions(x); ++a) {
      for (const auto& [to, p] : m.row(x, a)) {
        kernel.push_back({{"from", m.state_name(x)},
                          {"action", m.action_names(x)[a]},
                          {"to", m.state_name(to)},
                          {"p", p}});
      }
    }
  }
  doc["actions"] = std::move(actions);
  doc["kernel"] = std::move(kernel);
  json initial = json::object();
  for (int x = 0; x < m.num_states(); ++x) {
    if (m.initial()[x] > 0.0) initial[m.state_name(x)] = m.initial()[x];
  }
  doc["initial"] = std::move(initial);
  json absorbing = json::array();
  for (int x : m.absorbing_states()) absorbing.push_back(m.state_name(x));
  doc["absorbing"] = std::move(absorbing);
  return doc.dump(2) + "\n";
}

StationaryPolicy parse_policy(const std::string& text, const Model& m) {
  json doc = parse_json(text, "policy");
  if (!doc.is_object()) throw ParseError("policy: top level must be an object");
  std::vector<std::vector<double>> choice(m.num_states());
  std::vector<bool> seen(m.num_states(), false);
  for (const auto& [state, probs] : doc.items()) {
    int x = m.find_state(state);
    if (x < 0) throw PolicyMismatch("policy references unknown state '" + state + "'");
    if (!probs.is_object()) throw ParseError("policy['" + state + "'] must be an object");
    seen[x] = true;
    choice[x].assign(m.num_actions(x), 0.0);
    for (const auto& [action, p] : probs.items()) {
      int a = m.find_action(x, action);
      if (a < 0) {
        throw PolicyMismatch("policy assigns mass to action '" + action + "' not in A(" + state + ")");
      }
      choice[x][a] = probability_at(p, "policy['" + state + "']['" + action + "']");
    }
  }
  for (int x = 0; x < m.num_states(); ++x) {
    if (!seen[x]) throw PolicyMismatch("policy is missing state '" + m.state_name(x) + "'");
  }
  return StationaryPolicy::validated(m, std::move(choice));
}

StationaryPolicy load_policy(const std::filesystem::path& path, const Model& m) {
  return parse_policy(read_file(path), m);
}

std::string serialize_policy(const StationaryPolicy& policy, const Model& m) {
  json doc = json::object();
  for (int x = 0; x < m.num_states(); ++x) {
    json row = json::object();
    for (int a = 0; a < m.num_actions(x); ++a) {
      if (policy.at(x)[a] > 0.0) row[m.action_names(x)[a]] = policy.at(x)[a];
    }
    doc[m.state_name(x)] = std::move(row);
  }
  return doc.dump(2) + "\n";
}

StateActionMeasure parse_measure(const std::string& text, const Model& m) {
  json doc = parse_json(text, "measure");
  if (!doc.is_array()) throw ParseError("measure: top level must be an array");
  StateActionMeasure mu;
  int index = 0;
  for (const auto& rec : doc) {
    std::string where = "measure[" + std::to_string(index++) + "]";
    if (!rec.is_object() || !rec.contains("state") || !rec.contains("action") ||
        !rec.contains("mass")) {
      throw ParseError(where + " must be an object with state/action/mass");
    }
    if (!rec["state"].is_string() || !rec["action"].is_string()) {
      throw ParseError(where + ": state and action must be strings");
    }
    int x = m.state_index(rec["state"].get<std::string>(), where);
    int a = m.find_action(x, rec["action"].get<std::string>());
    if (a < 0) {
      throw ParseError(where + ": action '" + rec["action"].get<std::string>() +
                       "' is not available at state '" + m.state_name(x) + "'");
    }
    double mass = number_at(rec["mass"], where + ".mass");
    if (!std::isfinite(mass) || mass < -kNegMassTol) {
      throw ParseError(where + ": mass must be finite and nonnegative");
    }
    if (mass > 0.0) mu.add(x, a, mass);
  }
  return mu;
}

StateActionMeasure load_measure(const std::filesystem::path& path, const Model& m) {
  return parse_measure(read_file(path), m);
}

std::string serialize_measure(const StateActionMeasure& mu, const Model& m) {
  json doc = json::array();
  for (const auto& [key, mass] : mu.entries()) {
    if (mass <= 0.0) continue;  // clamp round-off dips on output
    doc.push_back({{"state", m.state_name(key.first)},
                   {"action", m.action_names(key.first)[key.second]},
                   {"mass", mass}});
  }
  return doc.dump(2) + "\n";
}

std::string serialize_state_measure(const StateMeasure& nu, const Model& m) {
  json doc = json::array();
  for (const auto& [x, mass] : nu.entries()) {
    if (mass <= 0.0) continue;
    doc.push_back({{"state", m.state_name(x)}, {"mass", mass}});
  }
  return doc.dump(2) + "\n";
}

std::vector<StateSet> parse_state_sets(const std::string& text, const Model& m) {
  json doc = parse_json(text, "state sets");
  if (!doc.is_array()) throw ParseError("state sets: top level must be an array");
  std::vector<StateSet> sets;
  int index = 0;
  for (const auto& entry : doc) {
    std::string where = "state sets[" + std::to_string(index++) + "]";
    if (!entry.is_array()) throw ParseError(where + " must be an array of state names");
    std::vector<std::string> names;
    for (const auto& s : entry) {
      if (!s.is_string()) throw ParseError(where + " entries must be strings");
      names.push_back(s.get<std::string>());
    }
    sets.push_back(StateSet::from_names(m, names));
  }
  return sets;
}

std::vector<StateSet> load_state_sets(const std::filesystem::path& path, const Model& m) {
  return parse_state_sets(read_file(path), m);
}

PairCoeffs parse_pair_coeffs(const std::string& text, const Model& m) {
  json doc = parse_json(text, "coefficients");
  if (!doc.is_object()) throw ParseError("coefficients: top level must be an object");
  PairCoeffs coeffs;
  for (const auto& [state, row] : doc.items()) {
    int x = m.state_index(state, "coefficients");
    if (!row.is_object()) throw ParseError("coefficients['" + state + "'] must be an object");
    for (const auto& [action, value] : row.items()) {
      int a = m.find_action(x, action);
      if (a < 0) {
        throw ParseError("coefficients: action '" + action + "' is not available at '" + state + "'");
      }
      coeffs[{x, a}] = number_at(value, "coefficients['" + state + "']['" + action + "']");
    }
  }
  return coeffs;
}

namespace {

LinearConstraint parse_one_constraint(const json& rec, const Model& m, const std::string& where) {
  if (!rec.is_object() || !rec.contains("coeffs") || !rec.contains("bound")) {
    throw ParseError(where + " must be an object with coeffs/bound/sense");
  }
  LinearConstraint c;
  c.coeffs = parse_pair_coeffs(rec["coeffs"].dump(), m);
  c.bound = number_at(rec["bound"], where + ".bound");
  std::string sense = rec.value("sense", "<=");
  if (sense == "<=") {
    c.sense = ConstraintSense::LessEqual;
  } else if (sense == ">=") {
    c.sense = ConstraintSense::GreaterEqual;
  } else if (sense == "=") {
    c.sense = ConstraintSense::Equal;
  } else {
    throw ParseError(where + ".sense must be one of \"<=\", \">=\", \"=\"");
  }
  return c;
}

}  // namespace

std::vector<LinearConstraint> parse_constraints(const std::string& text, const Model& m) {
  json doc = parse_json(text, "constraints");
  std::vector<LinearConstraint> out;
  if (doc.is_object()) {
    out.push_back(parse_one_constraint(doc, m, "constraint"));
  } else if (doc.is_array()) {
    int index = 0;
    for (const auto& rec : doc) {
      out.push_back(parse_one_constraint(rec, m, "constraints[" + std::to_string(index++) + "]"));
    }
  } else {
    throw ParseError("constraints: top level must be an object or an array");
  }
  return out;
}

std::vector<LinearConstraint> load_constraints(const std::filesystem::path& path, const Model& m) {
  return parse_constraints(read_file(path), m);
}

Model fixture_phantom(int n, double beta_model) {
  if (n < 3) throw BadParameter("phantom fixture needs N >= 3 to hold the chain and the cycle");
  if (!(beta_model > 0.0 && beta_model < 1.0)) {
    throw BadParameter("phantom fixture needs beta_model in (0,1)");
  }
  ModelData data;
  for (int i = 0; i <= n; ++i) data.states.push_back(std::to_string(i));
  data.states.push_back("-1");
  data.states.push_back("-2");
  for (const auto& s : data.states) data.actions[s] = {"a"};

  auto row = [&data](const std::string& from, const std::string& to, double p) {
    data.kernel.push_back({from, "a", to, p});
  };
  row("0", "0", 1.0);
  row("1", "0", 1.0);
  for (int i = 2; i < n; ++i) {
    row(std::to_string(i), "1", 1.0 - beta_model);
    row(std::to_string(i), std::to_string(i + 1), beta_model);
  }
  // Mass that would leave the truncation at state N is redirected into the
  // absorbing state, which keeps the model absorbing and the interior
  // occupation values exact.
  row(std::to_string(n), "1", 1.0 - beta_model);
  row(std::to_string(n), "0", beta_model);
  row("-1", "-1", 1.0 - beta_model);
  row("-1", "-2", beta_model);
  row("-2", "-2", 1.0 - beta_model);
  row("-2", "-1", beta_model);

  data.initial["1"] = 0.5;
  data.initial["2"] = 0.5;
  data.absorbing = {"0"};
  return validate_model(data);
}

Model fixture_tree(int levels) {
  if (levels < 1) throw BadParameter("tree fixture needs at least one level");
  if (levels > 20) throw BadParameter("tree fixture above 20 levels is too large");
  ModelData data;
  auto cell = [](int i, int j) { return std::to_string(i) + "_" + std::to_string(j); };
  for (int i = 0; i <= levels; ++i) {
    long width = 1L << i;
    for (long j = 0; j < width; ++j) data.states.push_back(cell(i, static_cast<int>(j)));
  }
  data.states.push_back("xbar");

  for (int i = 0; i <= levels; ++i) {
    long width = 1L << i;
    for (long j = 0; j < width; ++j) {
      std::string s = cell(i, static_cast<int>(j));
      if (j == 0 && i < levels) {
        data.actions[s] = {"c", "s"};  // descend is unavailable at the last level
      } else {
        data.actions[s] = {"s"};
      }
    }
  }
  data.actions["xbar"] = {"s"};

  for (int i = 0; i <= levels; ++i) {
    long width = 1L << i;
    for (long j = 0; j < width; ++j) {
      std::string s = cell(i, static_cast<int>(j));
      if (j == 0 && i < levels) {
        data.kernel.push_back({s, "c", "xbar", 0.5});
        data.kernel.push_back({s, "c", cell(i + 1, 0), 0.5});
      }
      if (j < width - 1) {
        data.kernel.push_back({s, "s", cell(i, static_cast<int>(j + 1)), 1.0});
      } else {
        data.kernel.push_back({s, "s", "xbar", 1.0});
      }
    }
  }
  data.kernel.push_back({"xbar", "s", "xbar", 1.0});

  data.initial["0_0"] = 1.0;
  data.absorbing = {"xbar"};
  return validate_model(data);
}

}  // namespace absorb
