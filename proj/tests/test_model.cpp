#include "doctest.h"

#include <cmath>

#include "absorb/absorption.hpp"
#include "absorb/io.hpp"
#include "absorb/model.hpp"
#include "support/fixtures.hpp"

using namespace absorb;
using namespace testsupport;

namespace {

ModelData small_candidate() {
  ModelData data;
  data.states = {"x", "y", "d"};
  data.actions["x"] = {"a"};
  data.actions["y"] = {"a"};
  data.actions["d"] = {"a"};
  data.kernel.push_back({"x", "a", "y", 0.5});
  data.kernel.push_back({"x", "a", "d", 0.5});
  data.kernel.push_back({"y", "a", "d", 1.0});
  data.kernel.push_back({"d", "a", "d", 1.0});
  data.initial["x"] = 1.0;
  data.absorbing = {"d"};
  return data;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("phantom fixture validates") {
  Model m = fixture_phantom(12, 0.5);
  CHECK(m.num_states() == 15);
  CHECK(m.num_pairs() == 15);
  CHECK(m.absorbing_states().size() == 1);
  CHECK(m.is_absorbing(m.find_state("0")));
  // Declaration order: 0..12 then the cycle states.
  CHECK(m.state_name(0) == "0");
  CHECK(m.state_name(13) == "-1");
  CHECK(m.state_name(14) == "-2");
}

TEST_CASE("row mass defect is rejected") {
  ModelData data = small_candidate();
  data.kernel[0].p = 0.4;  // row at (x, a) now sums to 0.9
  try {
    validate_model(data);
  } catch (const InvalidModel& e) {
    CHECK(e.fault == ModelFault::RowMassViolation);
  }
}

TEST_CASE("leaky absorbing set is rejected") {
  ModelData data = small_candidate();
  data.kernel.pop_back();
  data.kernel.push_back({"d", "a", "d", 0.5});
  data.kernel.push_back({"d", "a", "x", 0.5});
  try {
    validate_model(data);
    FAIL("expected InvalidModel");
  } catch (const InvalidModel& e) {
    CHECK(e.fault == ModelFault::AbsorbingSetNotClosed);
  }
}

TEST_CASE("declaration errors carry their category") {
  ModelData unknown = small_candidate();
  unknown.kernel.push_back({"x", "a", "zz", 0.0});
  unknown.kernel.push_back({"x", "a", "zz", 0.1});
  CHECK_THROWS_AS(validate_model(unknown), InvalidModel);

  ModelData empty = small_candidate();
  empty.actions["y"].clear();
  try {
    validate_model(empty);
    FAIL("expected InvalidModel");
  } catch (const InvalidModel& e) {
    CHECK(e.fault == ModelFault::EmptyActionSet);
  }

  ModelData bad_eta = small_candidate();
  bad_eta.initial["x"] = 0.7;
  try {
    validate_model(bad_eta);
    FAIL("expected InvalidModel");
  } catch (const InvalidModel& e) {
    CHECK(e.fault == ModelFault::BadInitialDistribution);
  }
}

TEST_CASE("with_initial revalidates") {
  Model m = validate_model(small_candidate());
  std::vector<double> eta(m.num_states(), 0.0);
  eta[m.find_state("y")] = 1.0;
  Model shifted = m.with_initial(eta);
  CHECK(shifted.initial()[m.find_state("y")] == 1.0);
  eta[0] = 5.0;
  CHECK_THROWS_AS(m.with_initial(eta), InvalidModel);
}

TEST_CASE("induced kernel: degenerate and mixed rows") {
  Model geo = geo_model(0.25);
  StationaryPolicy only = StationaryPolicy::uniform(geo);
  auto rows = induced_kernel(geo, only);
  int s = geo.find_state("s");
  int d = geo.find_state("d");
  REQUIRE(rows[s].size() == 2);
  CHECK(rows[s][0] == std::pair<int, double>{s, 0.75});
  CHECK(rows[s][1] == std::pair<int, double>{d, 0.25});

  // Uniform mix of two deterministic rows lands half on each target.
  Model two = two_action_model();
  auto mixed = induced_kernel(two, StationaryPolicy::uniform(two));
  int ts = two.find_state("s");
  int td = two.find_state("d");
  double to_d = 0.0, to_s = 0.0;
  for (auto [to, p] : mixed[ts]) (to == td ? to_d : to_s) += p;
  CHECK(to_d == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(to_s == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("induced kernel on the tree spine under descend") {
  Model tree = fixture_tree(4);
  StationaryPolicy g1 = tree_gamma(tree, 1);
  auto rows = induced_kernel(tree, g1);
  int root = tree.find_state("0_0");
  int xbar = tree.find_state("xbar");
  int next = tree.find_state("1_0");
  REQUIRE(rows[root].size() == 2);
  for (auto [to, p] : rows[root]) {
    CHECK((to == xbar || to == next));
    CHECK(p == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("induced kernel rows are stochastic on random models") {
  SplitMix64 rng(0xA001);
  for (int rep = 0; rep < 40; ++rep) {
    Model m = random_model(rng);
    StationaryPolicy policy = random_policy(rng, m);
    for (const auto& row : induced_kernel(m, policy)) {
      double sum = 0.0;
      for (auto [to, p] : row) sum += p;
      CHECK(std::abs(sum - 1.0) <= kRowMassTol);
    }
  }
}

TEST_CASE("reachability on the fixtures") {
  Model ph = fixture_phantom(12, 0.5);
  StateSet from_eta = reachable_states(ph, ph.support_of_initial());
  CHECK(from_eta.size() == 13);
  CHECK(from_eta.contains(ph.find_state("0")));
  CHECK(from_eta.contains(ph.find_state("12")));
  CHECK_FALSE(from_eta.contains(ph.find_state("-1")));
  CHECK_FALSE(from_eta.contains(ph.find_state("-2")));

  CHECK(reachable_states(ph, StateSet{}).empty());

  Model tree = fixture_tree(4);
  StateSet all = reachable_states(tree, StateSet::of({tree.find_state("0_0")}));
  CHECK(all.size() == tree.num_states());
}

TEST_CASE("reachability is monotone and idempotent") {
  SplitMix64 rng(0xA002);
  for (int rep = 0; rep < 30; ++rep) {
    Model m = random_model(rng);
    std::vector<int> a_members, b_members;
    for (int x = 0; x < m.num_states(); ++x) {
      double u = rng.next_unit();
      if (u < 0.3) a_members.push_back(x);
      if (u < 0.6) b_members.push_back(x);  // superset of a
    }
    StateSet a = StateSet::of(a_members);
    StateSet b = StateSet::of(b_members);
    StateSet ra = reachable_states(m, a);
    StateSet rb = reachable_states(m, b);
    CHECK(a.subset_of(ra));
    CHECK(ra.subset_of(rb));
    CHECK(reachable_states(m, ra) == ra);
  }
}

TEST_CASE("policy validation catches mismatches") {
  Model two = two_action_model();
  CHECK_THROWS_AS(StationaryPolicy::validated(two, {{1.0}}), PolicyMismatch);
  CHECK_THROWS_AS(StationaryPolicy::validated(two, {{0.5, 0.4}, {1.0}}), PolicyMismatch);
  CHECK_THROWS_AS(StationaryPolicy::pure(two, {5, 0}), PolicyMismatch);
}

}  // TEST_SUITE

TEST_SUITE("measure") {

TEST_CASE("disintegration normalizes the support") {
  Model two = two_action_model();
  int s = two.find_state("s");
  StateActionMeasure mu;
  mu.set(s, 0, 0.3);
  mu.set(s, 1, 0.7);
  Disintegration dis = disintegrate(mu, two);
  CHECK(dis.policy.at(s)[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(dis.policy.at(s)[1] == doctest::Approx(0.7).epsilon(1e-15));
  // Zero-mass state gets the uniform completion.
  int d = two.find_state("d");
  CHECK(dis.policy.at(d)[0] == 1.0);

  StateActionMeasure empty_at_s;
  empty_at_s.set(d, 0, 0.0);
  Disintegration dis2 = disintegrate(empty_at_s, two);
  CHECK(dis2.policy.at(s)[0] == doctest::Approx(0.5));
  CHECK(dis2.policy.at(s)[1] == doctest::Approx(0.5));
}

TEST_CASE("disintegrating an occupation measure recovers the policy on its support") {
  Model tree = fixture_tree(4);
  StationaryPolicy g1 = tree_gamma(tree, 1);
  StateActionMeasure mu = occupation_measure(tree, g1);
  Disintegration dis = disintegrate(mu, tree);
  StateSet visited = mu.marginal_x().support();
  CHECK(visited.size() == 3);  // the root, (1,0) and (1,1)
  for (int x : visited.members()) {
    for (int a = 0; a < tree.num_actions(x); ++a) {
      CHECK(dis.policy.at(x)[a] == doctest::Approx(g1.at(x)[a]).epsilon(1e-14));
    }
  }
}

TEST_CASE("disintegration rejects off-support mass") {
  Model two = two_action_model();
  StateActionMeasure mu;
  mu.set(two.find_state("d"), 1, 0.2);  // d has a single action
  CHECK_THROWS_AS(disintegrate(mu, two), SupportViolation);
}

TEST_CASE("disintegrate then recombine is exact") {
  SplitMix64 rng(0xA003);
  for (int rep = 0; rep < 30; ++rep) {
    Model m = random_model(rng);
    StateActionMeasure mu;
    for (int k = 0; k < m.num_pairs(); ++k) {
      if (rng.next_unit() < 0.5) continue;
      auto [x, a] = m.pair_at(k);
      mu.set(x, a, rng.next_unit() * 3.0);
    }
    Disintegration dis = disintegrate(mu, m);
    for (int x = 0; x < m.num_states(); ++x) {
      double direct = 0.0;
      for (int a = 0; a < m.num_actions(x); ++a) direct += mu.at(x, a);
      double recombined = 0.0;
      for (int a = 0; a < m.num_actions(x); ++a) {
        recombined += dis.marginal.at(x) * dis.policy.at(x)[a];
      }
      CHECK(std::abs(direct - recombined) <= 1e-12);
    }
  }
}

TEST_CASE("measure arithmetic clamps round-off but rejects real negatives") {
  StateActionMeasure a, b;
  a.set(0, 0, 1.0);
  b.set(0, 0, 1.0 + 1e-13);
  StateActionMeasure diff = a.minus(b);
  CHECK(diff.at(0, 0) == 0.0);
  b.set(0, 0, 2.0);
  CHECK_THROWS_AS(a.minus(b), NumericalError);
  CHECK_THROWS_AS(a.set(0, 1, -1.0), NumericalError);
}

}  // TEST_SUITE
