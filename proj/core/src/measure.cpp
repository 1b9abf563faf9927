#include "absorb/measure.hpp"

#include <cmath>
#include <string>

namespace absorb {

namespace {

void check_mass(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": non-finite mass");
  if (v < -kNegMassTol) {
    throw NumericalError(std::string(what) + ": negative mass " + std::to_string(v));
  }
}

}  // namespace

void StateMeasure::set(int x, double v) {
  check_mass(v, "StateMeasure");
  if (v == 0.0) {
    mass_.erase(x);
  } else {
    mass_[x] = v;
  }
}

void StateMeasure::add(int x, double v) { set(x, at(x) + v); }

double StateMeasure::at(int x) const {
  auto it = mass_.find(x);
  return it == mass_.end() ? 0.0 : it->second;
}

double StateMeasure::total() const {
  double sum = 0.0;
  for (const auto& [x, v] : mass_) sum += v;
  return sum;
}

StateSet StateMeasure::support(double eps) const {
  std::vector<int> members;
  for (const auto& [x, v] : mass_) {
    if (v > eps) members.push_back(x);
  }
  return StateSet::of(std::move(members));
}

double StateMeasure::l1_distance(const StateMeasure& other) const {
  double d = 0.0;
  auto a = mass_.begin();
  auto b = other.mass_.begin();
  while (a != mass_.end() || b != other.mass_.end()) {
    if (b == other.mass_.end() || (a != mass_.end() && a->first < b->first)) {
      d += std::abs(a->second);
      ++a;
    } else if (a == mass_.end() || b->first < a->first) {
      d += std::abs(b->second);
      ++b;
    } else {
      d += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return d;
}

void StateActionMeasure::set(int x, int a, double v) {
  check_mass(v, "StateActionMeasure");
  Key key{x, a};
  if (v == 0.0) {
    mass_.erase(key);
  } else {
    mass_[key] = v;
  }
}

void StateActionMeasure::add(int x, int a, double v) { set(x, a, at(x, a) + v); }

double StateActionMeasure::at(int x, int a) const {
  auto it = mass_.find({x, a});
  return it == mass_.end() ? 0.0 : it->second;
}

double StateActionMeasure::total() const {
  double sum = 0.0;
  for (const auto& [key, v] : mass_) sum += v;
  return sum;
}

StateMeasure StateActionMeasure::marginal_x() const {
  StateMeasure out;
  for (const auto& [key, v] : mass_) out.add(key.first, v);
  return out;
}

StateActionMeasure StateActionMeasure::scaled(double c) const {
  StateActionMeasure out;
  for (const auto& [key, v] : mass_) out.set(key.first, key.second, c * v);
  return out;
}

StateActionMeasure StateActionMeasure::plus(const StateActionMeasure& other) const {
  StateActionMeasure out = *this;
  for (const auto& [key, v] : other.mass_) out.add(key.first, key.second, v);
  return out;
}

StateActionMeasure StateActionMeasure::minus(const StateActionMeasure& other,
                                             double clamp_tol) const {
  StateActionMeasure out;
  auto a = mass_.begin();
  auto b = other.mass_.begin();
  auto emit = [&](Key key, double v) {
    if (v < -clamp_tol) {
      throw NumericalError("measure difference is negative by " + std::to_string(-v));
    }
    if (v > 0.0) out.set(key.first, key.second, v);
  };
  while (a != mass_.end() || b != other.mass_.end()) {
    if (b == other.mass_.end() || (a != mass_.end() && a->first < b->first)) {
      emit(a->first, a->second);
      ++a;
    } else if (a == mass_.end() || b->first < a->first) {
      emit(b->first, -b->second);
      ++b;
    } else {
      emit(a->first, a->second - b->second);
      ++a;
      ++b;
    }
  }
  return out;
}

bool StateActionMeasure::supported_on_feasible_pairs(const Model& m) const {
  for (const auto& [key, v] : mass_) {
    auto [x, a] = key;
    if (x < 0 || x >= m.num_states() || a < 0 || a >= m.num_actions(x)) {
      if (v > kSupportEps) return false;
    }
  }
  return true;
}

Disintegration disintegrate(const StateActionMeasure& mu, const Model& m) {
  if (!mu.supported_on_feasible_pairs(m)) {
    throw SupportViolation("measure puts mass outside the feasible pairs");
  }
  StateMeasure marginal = mu.marginal_x();
  std::vector<std::vector<double>> choice(m.num_states());
  for (int x = 0; x < m.num_states(); ++x) {
    int na = m.num_actions(x);
    double mx = marginal.at(x);
    if (mx > 0.0) {
      choice[x].resize(na);
      double clamped_sum = 0.0;
      for (int a = 0; a < na; ++a) clamped_sum += (choice[x][a] = std::max(mu.at(x, a), 0.0));
      for (int a = 0; a < na; ++a) choice[x][a] /= clamped_sum;
    } else {
      // The factorization only pins sigma on the support; off it we
      // complete with the uniform distribution over A(x).
      choice[x].assign(na, 1.0 / na);
    }
  }
  return {std::move(marginal), StationaryPolicy::validated(m, std::move(choice))};
}

}  // namespace absorb
