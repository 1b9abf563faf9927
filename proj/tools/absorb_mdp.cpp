// absorb-mdp: command-line front end for the absorbing-MDP toolkit.
// Subcommand reference and file formats are documented in docs/formats.md.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "absorb/absorption.hpp"
#include "absorb/characteristic.hpp"
#include "absorb/io.hpp"
#include "absorb/montecarlo.hpp"
#include "absorb/planner.hpp"

namespace {

using absorb::Model;
using absorb::StationaryPolicy;
using nlohmann::json;

enum class LogLevel { Off = 0, Error = 1, Info = 2, Debug = 3 };

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("ABSORB_MDP_LOG");
    if (!env) return LogLevel::Error;
    std::string v(env);
    if (v == "off") return LogLevel::Off;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Error;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[absorb-mdp] " << msg << "\n";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct Options {
  std::string format = "csv";
  std::string output;
  double tol = 1e-12;
  double residual_tol = 1e-8;
  double beta = 0.5;
  std::uint64_t seed = 20240901;
  bool close_absorbing = false;

  std::string model_path;
  std::string policy_path;
  std::vector<std::string> policy_paths;
  std::string measure_path;
  std::string occupation_path;
  std::string invariant_path;
  std::string sets_path;
  std::string cost_path;
  std::vector<std::string> constraint_paths;
  int t_max = 20;
  int n = 0;
  int n_max = 20;
  long n_traj = 10000;
  long horizon = 100000;
  std::string fixture_name;
  int fixture_n = 12;
  double fixture_beta_model = 0.5;
  int fixture_levels = 4;
};

void write_output(const Options& opts, const std::string& text) {
  if (opts.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opts.output, std::ios::binary);
  if (!out) throw absorb::ParseError("cannot open output file '" + opts.output + "'");
  out << text;
}

absorb::ModelData close_absorbing_rows(absorb::ModelData data) {
  std::vector<absorb::ModelData::KernelEntry> kept;
  for (auto& e : data.kernel) {
    bool from_absorbing = false;
    for (const auto& d : data.absorbing) {
      if (d == e.from) {
        from_absorbing = true;
        break;
      }
    }
    if (!from_absorbing) kept.push_back(std::move(e));
  }
  data.kernel = std::move(kept);
  for (const auto& d : data.absorbing) {
    auto it = data.actions.find(d);
    if (it == data.actions.end()) continue;
    for (const auto& a : it->second) data.kernel.push_back({d, a, d, 1.0});
  }
  return data;
}

Model load_model_with(const Options& opts) {
  std::ifstream in(opts.model_path, std::ios::binary);
  if (!in) throw absorb::ParseError("cannot open '" + opts.model_path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  absorb::ModelData data = absorb::parse_model_data(os.str());
  if (opts.close_absorbing) {
    log_info("rewriting absorbing-set rows as self-loops (--close-absorbing)");
    data = close_absorbing_rows(std::move(data));
  }
  try {
    Model m = absorb::validate_model(data);
    log_info("loaded model '" + opts.model_path + "': " + std::to_string(m.num_states()) +
             " states, " + std::to_string(m.num_pairs()) + " feasible pairs");
    return m;
  } catch (const absorb::InvalidModel& e) {
    if (e.fault == absorb::ModelFault::UnknownState) throw absorb::ParseError(e.what());
    throw;
  }
}

// The default policy, used when --policy is omitted: uniform over the
// available actions (the unique policy on single-action models).
StationaryPolicy policy_or_uniform(const Options& opts, const Model& m) {
  if (!opts.policy_path.empty()) return absorb::load_policy(opts.policy_path, m);
  log_info("no --policy given; using the uniform stationary policy");
  return StationaryPolicy::uniform(m);
}

std::vector<StationaryPolicy> load_family(const Options& opts, const Model& m) {
  std::vector<StationaryPolicy> family;
  for (const auto& path : opts.policy_paths) family.push_back(absorb::load_policy(path, m));
  return family;
}

json measure_json(const absorb::StateActionMeasure& mu, const Model& m) {
  json rows = json::array();
  for (const auto& [key, mass] : mu.entries()) {
    if (mass <= 0.0) continue;
    rows.push_back({{"state", m.state_name(key.first)},
                    {"action", m.action_names(key.first)[key.second]},
                    {"mass", mass}});
  }
  return rows;
}

json state_measure_json(const absorb::StateMeasure& nu, const Model& m) {
  json rows = json::array();
  for (const auto& [x, mass] : nu.entries()) {
    if (mass <= 0.0) continue;
    rows.push_back({{"state", m.state_name(x)}, {"mass", mass}});
  }
  return rows;
}

json policy_json(const StationaryPolicy& policy, const Model& m) {
  json doc = json::object();
  for (int x = 0; x < m.num_states(); ++x) {
    json row = json::object();
    for (int a = 0; a < m.num_actions(x); ++a) {
      if (policy.at(x)[a] > 0.0) row[m.action_names(x)[a]] = policy.at(x)[a];
    }
    doc[m.state_name(x)] = std::move(row);
  }
  return doc;
}

std::string measure_csv(const absorb::StateActionMeasure& mu, const Model& m) {
  std::ostringstream os;
  os << "state,action,mass\n";
  for (const auto& [key, mass] : mu.entries()) {
    if (mass <= 0.0) continue;
    os << csv_quote(m.state_name(key.first)) << ','
       << csv_quote(m.action_names(key.first)[key.second]) << ',' << fmt(mass) << '\n';
  }
  return os.str();
}

int cmd_validate(const Options& opts) {
  Model m = load_model_with(opts);
  if (opts.format == "json") {
    json doc{{"valid", true},
             {"states", m.num_states()},
             {"pairs", m.num_pairs()},
             {"absorbing", static_cast<int>(m.absorbing_states().size())}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "valid,true\n"
       << "states," << m.num_states() << '\n'
       << "pairs," << m.num_pairs() << '\n'
       << "absorbing," << m.absorbing_states().size() << '\n';
    write_output(opts, os.str());
  }
  return 0;
}

int cmd_occupation(const Options& opts) {
  Model m = load_model_with(opts);
  StationaryPolicy policy = policy_or_uniform(opts, m);
  absorb::OccupationOptions oo{.tol = opts.tol};
  absorb::StateActionMeasure mu = absorb::occupation_measure(m, policy, oo);
  if (opts.format == "json") {
    json doc{{"measure", measure_json(mu, m)}, {"total_mass", mu.total()}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    write_output(opts, measure_csv(mu, m));
  }
  return 0;
}

int cmd_hitting_time(const Options& opts) {
  Model m = load_model_with(opts);
  StationaryPolicy policy = policy_or_uniform(opts, m);
  double t = absorb::expected_hitting_time(m, policy, {.tol = opts.tol});
  if (opts.format == "json") {
    json doc{{"expected_hitting_time", t}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    write_output(opts, "expected_hitting_time\n" + fmt(t) + "\n");
  }
  return 0;
}

int cmd_survival(const Options& opts) {
  Model m = load_model_with(opts);
  StationaryPolicy policy = policy_or_uniform(opts, m);
  std::vector<double> curve = absorb::survival_curve(m, policy, opts.t_max);
  if (opts.format == "json") {
    json doc{{"survival", curve}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "t,survival\n";
    for (std::size_t t = 0; t < curve.size(); ++t) os << t << ',' << fmt(curve[t]) << '\n';
    write_output(opts, os.str());
  }
  return 0;
}

int cmd_tailsum(const Options& opts) {
  Model m = load_model_with(opts);
  StationaryPolicy policy = policy_or_uniform(opts, m);
  double v = absorb::tail_sum(m, policy, opts.n, {.tol = opts.tol});
  if (opts.format == "json") {
    json doc{{"n", opts.n}, {"tail_sum", v}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    write_output(opts, "n,tail_sum\n" + std::to_string(opts.n) + "," + fmt(v) + "\n");
  }
  return 0;
}

int cmd_profile(const Options& opts) {
  Model m = load_model_with(opts);
  auto family = load_family(opts, m);
  std::vector<double> profile =
      absorb::uniform_absorption_profile(m, family, opts.n_max, {.tol = opts.tol});
  if (opts.format == "json") {
    json doc{{"profile", profile}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "n,profile\n";
    for (std::size_t n = 0; n < profile.size(); ++n) os << n << ',' << fmt(profile[n]) << '\n';
    write_output(opts, os.str());
  }
  return 0;
}

int cmd_escaping(const Options& opts) {
  Model m = load_model_with(opts);
  auto family = load_family(opts, m);
  auto gammas = absorb::load_state_sets(opts.sets_path, m);
  auto by_policy = absorb::escaping_mass_by_policy(m, family, gammas, {.tol = opts.tol});
  if (opts.format == "json") {
    json entries = json::array();
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      json per_policy = json::array();
      double max_mass = 0.0;
      for (std::size_t k = 0; k < family.size(); ++k) {
        per_policy.push_back(by_policy[k][i]);
        max_mass = std::max(max_mass, by_policy[k][i]);
      }
      entries.push_back({{"index", i},
                         {"set_size", gammas[i].size()},
                         {"per_policy", std::move(per_policy)},
                         {"max", max_mass}});
    }
    json doc{{"entries", std::move(entries)}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "index,set_size,max";
    for (std::size_t k = 0; k < family.size(); ++k) os << ",policy_" << k;
    os << '\n';
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      double max_mass = 0.0;
      for (std::size_t k = 0; k < family.size(); ++k) max_mass = std::max(max_mass, by_policy[k][i]);
      os << i << ',' << gammas[i].size() << ',' << fmt(max_mass);
      for (std::size_t k = 0; k < family.size(); ++k) os << ',' << fmt(by_policy[k][i]);
      os << '\n';
    }
    write_output(opts, os.str());
  }
  return 0;
}

int cmd_refmeasure(const Options& opts) {
  Model m = load_model_with(opts);
  absorb::StateMeasure lam = absorb::reference_measure(m, {.beta = opts.beta, .tol = opts.tol});
  if (opts.format == "json") {
    json doc{{"measure", state_measure_json(lam, m)}, {"total_mass", lam.total()}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "state,mass\n";
    for (const auto& [x, mass] : lam.entries()) {
      if (mass > 0.0) os << csv_quote(m.state_name(x)) << ',' << fmt(mass) << '\n';
    }
    write_output(opts, os.str());
  }
  return 0;
}

int cmd_residual(const Options& opts) {
  Model m = load_model_with(opts);
  absorb::StateActionMeasure mu = absorb::load_measure(opts.measure_path, m);
  double r = absorb::characteristic_residual(m, mu);
  if (opts.format == "json") {
    json doc{{"residual", r}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    write_output(opts, "residual\n" + fmt(r) + "\n");
  }
  return 0;
}

int cmd_decompose(const Options& opts) {
  Model m = load_model_with(opts);
  absorb::StateActionMeasure mu = absorb::load_measure(opts.measure_path, m);
  absorb::DecompositionResult result =
      absorb::decompose(m, mu, {.residual_tol = opts.residual_tol, .tol = opts.tol});
  if (opts.format == "json") {
    json doc{{"invariant_mass", result.invariant_part.total()},
             {"occupation_mass", result.occupation_part.total()},
             {"occupation_part", measure_json(result.occupation_part, m)},
             {"invariant_part", measure_json(result.invariant_part, m)},
             {"policy", policy_json(result.policy, m)},
             {"residuals",
              {{"characteristic", result.residuals.characteristic},
               {"invariance", result.residuals.invariance},
               {"cauchy_gap", result.residuals.cauchy_gap},
               {"iterations", result.residuals.iterations},
               {"period", result.residuals.period}}}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "invariant_mass," << fmt(result.invariant_part.total()) << '\n'
       << "occupation_mass," << fmt(result.occupation_part.total()) << '\n'
       << "characteristic_residual," << fmt(result.residuals.characteristic) << '\n'
       << "invariance_residual," << fmt(result.residuals.invariance) << '\n'
       << "iterations," << result.residuals.iterations << '\n'
       << "period," << result.residuals.period << '\n'
       << "part,state,action,mass\n";
    for (const char* part : {"occupation", "invariant"}) {
      const auto& measure = std::string(part) == "occupation" ? result.occupation_part
                                                              : result.invariant_part;
      for (const auto& [key, mass] : measure.entries()) {
        if (mass <= 0.0) continue;
        os << part << ',' << csv_quote(m.state_name(key.first)) << ','
           << csv_quote(m.action_names(key.first)[key.second]) << ',' << fmt(mass) << '\n';
      }
    }
    write_output(opts, os.str());
  }
  return 0;
}

int cmd_phantom(const Options& opts) {
  Model m = load_model_with(opts);
  std::optional<absorb::StateActionMeasure> theta = absorb::find_phantom_direction(m);
  if (opts.format == "json") {
    json doc{{"feasible", theta.has_value()}};
    doc["theta"] = theta ? measure_json(*theta, m) : json::array();
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "feasible," << (theta ? "true" : "false") << '\n';
    if (theta) os << measure_csv(*theta, m);
    write_output(opts, os.str());
  }
  return 0;
}

int cmd_classify(const Options& opts) {
  Model m = load_model_with(opts);
  absorb::StateActionMeasure mu = absorb::load_measure(opts.measure_path, m);
  absorb::StateMeasure lam = absorb::reference_measure(m, {.beta = opts.beta});
  absorb::Classification c = absorb::classify(m, mu, lam, opts.residual_tol);
  std::vector<std::string> evidence;
  for (int x : c.off_support_states) evidence.push_back(m.state_name(x));
  if (opts.format == "json") {
    json doc{{"verdict", absorb::to_string(c.verdict)},
             {"residual", c.residual},
             {"evidence", evidence}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "verdict," << absorb::to_string(c.verdict) << '\n'
       << "residual," << fmt(c.residual) << '\n';
    std::string joined;
    for (const auto& s : evidence) {
      if (!joined.empty()) joined += ' ';
      joined += s;
    }
    os << "evidence," << csv_quote(joined) << '\n';
    write_output(opts, os.str());
  }
  return 0;
}

int cmd_singular(const Options& opts) {
  Model m = load_model_with(opts);
  absorb::StateActionMeasure occ = absorb::load_measure(opts.occupation_path, m);
  absorb::StateActionMeasure theta = absorb::load_measure(opts.invariant_path, m);
  bool singular = absorb::singularity_check(m, occ, theta);
  if (opts.format == "json") {
    json doc{{"singular", singular}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    write_output(opts, std::string("singular,") + (singular ? "true" : "false") + "\n");
  }
  return 0;
}

int cmd_plan(const Options& opts) {
  Model m = load_model_with(opts);
  absorb::PlanningProblem problem{m, {}, {}};
  {
    std::ifstream in(opts.cost_path, std::ios::binary);
    if (!in) throw absorb::ParseError("cannot open '" + opts.cost_path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    problem.cost = absorb::parse_pair_coeffs(os.str(), m);
  }
  for (const auto& path : opts.constraint_paths) {
    auto batch = absorb::load_constraints(path, m);
    problem.constraints.insert(problem.constraints.end(), batch.begin(), batch.end());
  }
  absorb::Plan plan = absorb::solve_constrained(problem);
  // The Plan report is always JSON; see docs/formats.md.
  json doc{{"value", plan.value},
           {"occupation", measure_json(plan.occupation, m)},
           {"policy", policy_json(plan.policy, m)},
           {"residual", plan.residual}};
  write_output(opts, doc.dump(2) + "\n");
  return 0;
}

int cmd_simulate(const Options& opts) {
  Model m = load_model_with(opts);
  StationaryPolicy policy = policy_or_uniform(opts, m);
  absorb::OccupationEstimate est =
      absorb::estimate_occupation(m, policy, opts.n_traj, opts.seed, opts.horizon);
  if (opts.format == "json") {
    json cells = json::array();
    for (const auto& [key, mean] : est.mean.entries()) {
      cells.push_back({{"state", m.state_name(key.first)},
                       {"action", m.action_names(key.first)[key.second]},
                       {"mean", mean},
                       {"std_error", est.std_error.at(key)}});
    }
    json doc{{"n_traj", est.n_samples},
             {"censored_fraction", est.censored_fraction},
             {"total", {{"mean", est.total.point}, {"std_error", est.total.std_error}}},
             {"cells", std::move(cells)}};
    write_output(opts, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "n_traj," << est.n_samples << '\n'
       << "censored_fraction," << fmt(est.censored_fraction) << '\n'
       << "total_mean," << fmt(est.total.point) << '\n'
       << "total_stderr," << fmt(est.total.std_error) << '\n'
       << "state,action,mean,stderr\n";
    for (const auto& [key, mean] : est.mean.entries()) {
      os << csv_quote(m.state_name(key.first)) << ','
         << csv_quote(m.action_names(key.first)[key.second]) << ',' << fmt(mean) << ','
         << fmt(est.std_error.at(key)) << '\n';
    }
    write_output(opts, os.str());
  }
  return 0;
}

int cmd_fixture(const Options& opts) {
  Model m = opts.fixture_name == "phantom"
                ? absorb::fixture_phantom(opts.fixture_n, opts.fixture_beta_model)
                : absorb::fixture_tree(opts.fixture_levels);
  write_output(opts, absorb::serialize_model(m));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Occupation-measure toolkit for absorbing Markov decision processes"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opts;
  app.add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--output,-o", opts.output, "Write output to a file instead of stdout");
  app.add_option("--tol", opts.tol, "Series/iteration truncation tolerance")
      ->capture_default_str();
  app.add_option("--seed", opts.seed, "Master seed for simulation")->capture_default_str();
  app.add_flag("--close-absorbing", opts.close_absorbing,
               "Rewrite absorbing-set rows as self-loops before validation");

  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--model,-m", opts.model_path, "Model file (JSON)")->required();
  };
  auto add_policy = [&](CLI::App* cmd) {
    cmd->add_option("--policy,-p", opts.policy_path,
                    "Policy file (JSON); defaults to the uniform policy");
  };
  auto add_family = [&](CLI::App* cmd) {
    cmd->add_option("--policy,-p", opts.policy_paths, "Policy files (repeatable)")
        ->required()
        ->take_all();
  };

  CLI::App* validate = app.add_subcommand("validate", "Validate a model file");
  add_model(validate);

  CLI::App* occupation = app.add_subcommand("occupation", "Occupation measure of a policy");
  add_model(occupation);
  add_policy(occupation);

  CLI::App* hitting = app.add_subcommand("hitting-time", "Expected hitting time of a policy");
  add_model(hitting);
  add_policy(hitting);

  CLI::App* survival = app.add_subcommand("survival", "Survival curve P{T > t}");
  add_model(survival);
  add_policy(survival);
  survival->add_option("--tmax", opts.t_max, "Largest t")->capture_default_str();

  CLI::App* tailsum = app.add_subcommand("tailsum", "Tail sum of survival probabilities");
  add_model(tailsum);
  add_policy(tailsum);
  tailsum->add_option("--n", opts.n, "Tail start index")->capture_default_str();

  CLI::App* profile = app.add_subcommand("profile", "Uniform-absorption profile of a family");
  add_model(profile);
  add_family(profile);
  profile->add_option("--nmax", opts.n_max, "Largest tail index")->capture_default_str();

  CLI::App* escaping = app.add_subcommand("escaping", "Escaping mass on decreasing state sets");
  add_model(escaping);
  add_family(escaping);
  escaping->add_option("--sets", opts.sets_path, "State-set file (JSON)")->required();

  CLI::App* refmeasure = app.add_subcommand("refmeasure", "Reference measure of the model");
  add_model(refmeasure);
  refmeasure->add_option("--beta", opts.beta, "Geometric mixing weight in (0,1)")
      ->capture_default_str();

  CLI::App* residual = app.add_subcommand("residual", "Characteristic residual of a measure");
  add_model(residual);
  residual->add_option("--measure", opts.measure_path, "Measure file (JSON)")->required();

  CLI::App* decompose = app.add_subcommand("decompose", "Occupation + invariant decomposition");
  add_model(decompose);
  decompose->add_option("--measure", opts.measure_path, "Measure file (JSON)")->required();
  decompose->add_option("--residual-tol", opts.residual_tol, "Solution-hood tolerance")
      ->capture_default_str();

  CLI::App* phantom = app.add_subcommand("phantom", "Search for an invariant (phantom) direction");
  add_model(phantom);

  CLI::App* classify = app.add_subcommand("classify", "Classify a characteristic solution");
  add_model(classify);
  classify->add_option("--measure", opts.measure_path, "Measure file (JSON)")->required();
  classify->add_option("--beta", opts.beta, "Reference-measure weight")->capture_default_str();
  classify->add_option("--residual-tol", opts.residual_tol, "Solution-hood tolerance")
      ->capture_default_str();

  CLI::App* singular = app.add_subcommand("singular", "Mutual-singularity check of two measures");
  add_model(singular);
  singular->add_option("--occupation", opts.occupation_path, "Occupation measure file")->required();
  singular->add_option("--invariant", opts.invariant_path, "Invariant measure file")->required();

  CLI::App* plan = app.add_subcommand("plan", "Constrained expected-total-cost planning");
  add_model(plan);
  plan->add_option("--cost", opts.cost_path, "Cost file (JSON)")->required();
  plan->add_option("--constraint", opts.constraint_paths, "Constraint files (repeatable)")
      ->take_all();

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo occupation estimate");
  add_model(simulate);
  add_policy(simulate);
  simulate->add_option("--traj", opts.n_traj, "Number of trajectories")->capture_default_str();
  simulate->add_option("--horizon", opts.horizon, "Censoring horizon")->capture_default_str();

  CLI::App* fixture = app.add_subcommand("fixture", "Emit a built-in example model");
  fixture->add_option("--name", opts.fixture_name, "phantom or tree")
      ->required()
      ->check(CLI::IsMember({"phantom", "tree"}));
  fixture->add_option("--n", opts.fixture_n, "Chain length (phantom)")->capture_default_str();
  fixture->add_option("--beta-model", opts.fixture_beta_model, "Transition weight (phantom)")
      ->capture_default_str();
  fixture->add_option("--levels", opts.fixture_levels, "Levels (tree)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(opts);
    if (app.got_subcommand(occupation)) return cmd_occupation(opts);
    if (app.got_subcommand(hitting)) return cmd_hitting_time(opts);
    if (app.got_subcommand(survival)) return cmd_survival(opts);
    if (app.got_subcommand(tailsum)) return cmd_tailsum(opts);
    if (app.got_subcommand(profile)) return cmd_profile(opts);
    if (app.got_subcommand(escaping)) return cmd_escaping(opts);
    if (app.got_subcommand(refmeasure)) return cmd_refmeasure(opts);
    if (app.got_subcommand(residual)) return cmd_residual(opts);
    if (app.got_subcommand(decompose)) return cmd_decompose(opts);
    if (app.got_subcommand(phantom)) return cmd_phantom(opts);
    if (app.got_subcommand(classify)) return cmd_classify(opts);
    if (app.got_subcommand(singular)) return cmd_singular(opts);
    if (app.got_subcommand(plan)) return cmd_plan(opts);
    if (app.got_subcommand(simulate)) return cmd_simulate(opts);
    if (app.got_subcommand(fixture)) return cmd_fixture(opts);
  } catch (const absorb::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const absorb::InvalidModel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const absorb::PolicyMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const absorb::SupportViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const absorb::BadParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const absorb::DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const absorb::AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const absorb::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
