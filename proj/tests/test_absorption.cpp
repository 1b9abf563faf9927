#include "doctest.h"

#include <cmath>

#include "absorb/absorption.hpp"
#include "absorb/io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace absorb;
using namespace testsupport;

TEST_SUITE("absorption") {

TEST_CASE("occupation of the phantom chain matches the closed form") {
  Model ph = fixture_phantom(12, 0.5);
  StationaryPolicy only = StationaryPolicy::uniform(ph);
  StateMeasure mx = occupation_measure(ph, only).marginal_x();
  // Chain values 1/2 * beta^(n-2); state 1 collects everything except the
  // mass the truncation redirects into the absorbing state.
  for (int n = 2; n <= 12; ++n) {
    CHECK(std::abs(mx.at(ph.find_state(std::to_string(n))) - 0.5 * std::pow(0.5, n - 2)) <=
          1e-12);
  }
  CHECK(std::abs(mx.at(ph.find_state("1")) - (1.0 - 1.0 / 4096.0)) <= 1e-12);
  CHECK(mx.at(ph.find_state("0")) == 0.0);
  CHECK(mx.at(ph.find_state("-1")) == 0.0);
  CHECK(std::abs(expected_hitting_time(ph, only) - (2.0 - 3.0 / 4096.0)) <= 1e-12);
}

TEST_CASE("one-step and geometric models") {
  Model triv = triv_model();
  StateMeasure mx = occupation_measure(triv, StationaryPolicy::uniform(triv)).marginal_x();
  CHECK(mx.at(triv.find_state("s")) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mx.at(triv.find_state("d")) == 0.0);

  Model geo = geo_model(0.25);
  CHECK(expected_hitting_time(geo, StationaryPolicy::uniform(geo)) ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("tree under the first descend policy") {
  Model tree = fixture_tree(4);
  StationaryPolicy g1 = tree_gamma(tree, 1);
  CHECK(std::abs(expected_hitting_time(tree, g1) - 2.0) <= 1e-14);

  auto curve = survival_curve(tree, g1, 5);
  CHECK(curve[0] == doctest::Approx(1.0));
  CHECK(curve[1] == doctest::Approx(0.5));
  CHECK(curve[2] == doctest::Approx(0.5));
  CHECK(curve[3] == doctest::Approx(0.0));

  CHECK(tail_sum(tree, g1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("occupation agrees with the power-sum oracle") {
  SplitMix64 rng(0xB001);
  for (int rep = 0; rep < 30; ++rep) {
    Model m = random_model(rng);
    StationaryPolicy policy = random_policy(rng, m);
    StateActionMeasure solved = occupation_measure(m, policy);
    StateActionMeasure oracle = occupation_power_oracle(m, policy);
    for (int k = 0; k < m.num_pairs(); ++k) {
      auto [x, a] = m.pair_at(k);
      CHECK(std::abs(solved.at(x, a) - oracle.at(x, a)) <= 1e-9);
    }
  }
}

TEST_CASE("total mass equals the hitting time and avoids the absorbing set") {
  SplitMix64 rng(0xB002);
  for (int rep = 0; rep < 30; ++rep) {
    Model m = random_model(rng);
    StationaryPolicy policy = random_policy(rng, m);
    StateActionMeasure mu = occupation_measure(m, policy);
    CHECK(std::abs(mu.total() - expected_hitting_time(m, policy)) <= 1e-9);
    CHECK(mu.supported_on_feasible_pairs(m));
    for (const auto& [key, mass] : mu.entries()) {
      CHECK_FALSE(m.is_absorbing(key.first));
      CHECK(mass >= 0.0);
    }
  }
}

TEST_CASE("survival curves and tail sums are consistent") {
  Model triv = triv_model();
  auto triv_curve = survival_curve(triv, StationaryPolicy::uniform(triv), 3);
  CHECK(triv_curve == std::vector<double>{1.0, 0.0, 0.0, 0.0});

  Model geo = geo_model(0.5);
  StationaryPolicy only = StationaryPolicy::uniform(geo);
  auto curve = survival_curve(geo, only, 10);
  for (int t = 0; t <= 10; ++t) CHECK(curve[t] == doctest::Approx(std::pow(0.5, t)));
  CHECK(tail_sum(geo, only, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(tail_sum(geo, only, 2) == doctest::Approx(0.5).epsilon(1e-12));

  SplitMix64 rng(0xB003);
  for (int rep = 0; rep < 20; ++rep) {
    Model m = random_model(rng);
    StationaryPolicy policy = random_policy(rng, m);
    auto sc = survival_curve(m, policy, 12);
    for (int t = 0; t + 1 <= 12; ++t) {
      CHECK(sc[t + 1] <= sc[t] + 1e-12);
      CHECK(sc[t] >= -1e-12);
      CHECK(sc[t] <= 1.0 + 1e-12);
      double diff = tail_sum(m, policy, t) - tail_sum(m, policy, t + 1);
      CHECK(std::abs(diff - sc[t]) <= 1e-10);
    }
  }
}

TEST_CASE("uniform absorption profile") {
  Model geo = geo_model(0.5);
  auto profile = uniform_absorption_profile(geo, {StationaryPolicy::uniform(geo)}, 8);
  for (int n = 0; n <= 8; ++n) CHECK(profile[n] == doctest::Approx(std::pow(2.0, 1 - n)));

  Model tree = fixture_tree(4);
  std::vector<StationaryPolicy> family;
  for (int t = 0; t <= 4; ++t) family.push_back(tree_gamma(tree, t));
  auto tree_profile = uniform_absorption_profile(tree, family, 6);
  double max_expected = 0.0;
  for (const auto& g : family) {
    max_expected = std::max(max_expected, expected_hitting_oracle(tree, g));
  }
  CHECK(tree_profile[0] == doctest::Approx(max_expected).epsilon(1e-12));
  for (int n = 0; n < 6; ++n) CHECK(tree_profile[n + 1] <= tree_profile[n] + 1e-12);

  CHECK_THROWS_AS(uniform_absorption_profile(geo, {}, 3), EmptyFamily);
}

TEST_CASE("escaping mass on the tree") {
  Model tree = fixture_tree(4);
  std::vector<StationaryPolicy> family;
  for (int t = 1; t <= 4; ++t) family.push_back(tree_gamma(tree, t));
  auto gammas = tree_gamma_sets(tree, 4);
  auto by_policy = escaping_mass_by_policy(tree, family, gammas);
  for (int n = 1; n <= 4; ++n) {
    // Under gamma_n the column states (n, 1..2^n - 1) carry mass 2^-n each.
    CHECK(std::abs(by_policy[n - 1][n - 1] - (1.0 - std::pow(2.0, -n))) <= 1e-14);
    for (int t = 1; t < n; ++t) CHECK(by_policy[t - 1][n - 1] == 0.0);
  }
  auto max_mass = escaping_mass(tree, family, gammas);
  for (std::size_t i = 0; i + 1 < max_mass.size(); ++i) {
    CHECK(max_mass[i + 1] <= max_mass[i] + 1e-12);
  }
  // The deepest column lies inside every set, so the max is flat here.
  for (double v : max_mass) CHECK(v == doctest::Approx(15.0 / 16.0));
}

TEST_CASE("escaping mass edge cases") {
  Model geo = geo_model(0.5);
  StationaryPolicy only = StationaryPolicy::uniform(geo);
  auto zero = escaping_mass(geo, {only}, {StateSet{}, StateSet{}});
  CHECK(zero == std::vector<double>{0.0, 0.0});

  StateSet transient = StateSet::of({geo.find_state("s")});
  auto whole = escaping_mass(geo, {only}, {transient});
  CHECK(whole[0] == doctest::Approx(2.0).epsilon(1e-12));

  StateSet bigger = StateSet::of({geo.find_state("s"), geo.find_state("d")});
  CHECK_THROWS_AS(escaping_mass(geo, {only}, {transient, bigger}), NotDecreasing);
}

TEST_CASE("reference policy weights and dominance") {
  Model geo = geo_model(0.5);
  StationaryPolicy geo_ref = reference_policy(geo);
  CHECK(geo_ref.at(geo.find_state("s"))[0] == 1.0);

  Model two = two_action_model();
  StationaryPolicy two_ref = reference_policy(two);
  const auto& probs = two_ref.at(two.find_state("s"));
  CHECK(probs[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(probs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  // Dominance: anything an action can reach, the reference kernel reaches.
  SplitMix64 rng(0xB004);
  std::vector<Model> models{fixture_tree(4)};
  for (int rep = 0; rep < 20; ++rep) models.push_back(random_model(rng));
  for (const Model& m : models) {
    auto ref_rows = induced_kernel(m, reference_policy(m));
    for (int x = 0; x < m.num_states(); ++x) {
      StateSet ref_support = [&] {
        std::vector<int> members;
        for (auto [to, p] : ref_rows[x]) {
          if (p > 0.0) members.push_back(to);
        }
        return StateSet::of(members);
      }();
      for (int a = 0; a < m.num_actions(x); ++a) {
        for (auto [to, p] : m.row(x, a)) {
          if (p > 0.0) CHECK(ref_support.contains(to));
        }
      }
    }
  }
}

TEST_CASE("reference measure on the fixtures") {
  Model triv = triv_model();
  StateMeasure lam = reference_measure(triv, {.beta = 0.5});
  CHECK(lam.at(triv.find_state("s")) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lam.at(triv.find_state("d")) == doctest::Approx(0.5).epsilon(1e-12));

  Model ph = fixture_phantom(12, 0.5);
  StateMeasure ph_lam = reference_measure(ph);
  CHECK(std::abs(ph_lam.total() - 1.0) <= 1e-10);
  CHECK(ph_lam.support() == reachable_states(ph, ph.support_of_initial()));
  CHECK(ph_lam.at(ph.find_state("-1")) == 0.0);

  CHECK_THROWS_AS(reference_measure(ph, {.beta = 1.5}), BadParameter);
}

TEST_CASE("reference measure support equals the reachable closure") {
  SplitMix64 rng(0xB005);
  for (int rep = 0; rep < 20; ++rep) {
    Model m = random_model(rng);
    StateMeasure lam = reference_measure(m);
    CHECK(std::abs(lam.total() - 1.0) <= 1e-10);
    CHECK(lam.support() == reachable_states(m, m.support_of_initial()));
  }
}

TEST_CASE("the reference-started model stays absorbing") {
  Model tree = fixture_tree(4);
  std::vector<double> lam(tree.num_states(), 0.0);
  StateMeasure ref = reference_measure(tree);
  for (const auto& [x, v] : ref.entries()) lam[x] = v;
  Model restarted = tree.with_initial(lam);
  for (int t = 0; t <= 4; ++t) {
    double e = expected_hitting_time(restarted, tree_gamma(restarted, t));
    CHECK(std::isfinite(e));
    CHECK(e >= 0.0);
  }
}

TEST_CASE("non-absorbing pairs are reported") {
  ModelData data;
  data.states = {"s", "loop", "d"};
  data.actions["s"] = {"a"};
  data.actions["loop"] = {"a"};
  data.actions["d"] = {"a"};
  data.kernel.push_back({"s", "a", "loop", 1.0});
  data.kernel.push_back({"loop", "a", "loop", 1.0});
  data.kernel.push_back({"d", "a", "d", 1.0});
  data.initial["s"] = 1.0;
  data.absorbing = {"d"};
  Model m = validate_model(data);
  CHECK_THROWS_AS(occupation_measure(m, StationaryPolicy::uniform(m), {.max_iter = 5000}),
                  NonAbsorbing);
}

TEST_CASE("absorption report invariants") {
  Model tree = fixture_tree(3);
  StationaryPolicy g2 = tree_gamma(tree, 2);
  AbsorptionReport report = absorption_report(tree, g2, 16);
  CHECK(std::abs(report.tail[0] - report.expected_hitting_time) <= 1e-12);
  for (std::size_t t = 0; t + 1 < report.survival.size(); ++t) {
    CHECK(report.survival[t + 1] <= report.survival[t] + 1e-12);
    CHECK(std::abs(report.tail[t] - report.tail[t + 1] - report.survival[t]) <= 1e-10);
  }
  CHECK(report.expected_hitting_time ==
        doctest::Approx(expected_hitting_oracle(tree, g2)).epsilon(1e-12));
}

}  // TEST_SUITE
