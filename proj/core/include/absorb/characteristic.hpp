#pragma once

#include <optional>
#include <vector>

#include "absorb/measure.hpp"
#include "absorb/model.hpp"

namespace absorb {

// Max violation of the characteristic system by mu: over transient states,
// |mu^X(x) - eta(x) - sum_(y,b) mu(y,b) Q(x|y,b)|, with mass on absorbing
// states and mass outside the feasible pairs folded in as extra terms.
double characteristic_residual(const Model& m, const StateActionMeasure& mu);

struct DecomposeOptions {
  double residual_tol = 1e-8;  // gate: input must solve the characteristic system
  double tol = 1e-12;          // l1-Cauchy stop for the tail iteration
  long max_iter = 1'000'000;
  int period_cap = 256;        // longest invariant-cycle period the averager handles
};

struct DecompositionResult {
  StateActionMeasure occupation_part;
  StateActionMeasure invariant_part;
  StationaryPolicy policy;  // disintegration of the input
  struct Residuals {
    double characteristic = 0.0;  // of the input
    double invariance = 0.0;      // of the invariant part
    double cauchy_gap = 0.0;      // final iteration gap
    long iterations = 0;
    int period = 1;               // detected cycle period (1 = plain convergence)
  } residuals;
};

// Splits a solution of the characteristic system into an occupation
// measure and an invariant measure for the killed kernel, by iterating
// the disintegrated kernel until the transient mass has drained. A
// Cesaro average over one detected period handles periodic invariant
// cycles. Throws NotASolution / NoConvergence.
DecompositionResult decompose(const Model& m, const StateActionMeasure& mu,
                              const DecomposeOptions& opts = {});

// Searches for a normalized invariant measure of the killed kernel via LP
// feasibility: theta >= 0 on feasible pairs off the absorbing set, total
// mass one, and per transient state theta^X(x) = (theta Q)(x). Feasible
// iff phantom solutions exist. Returns nothing when infeasible.
std::optional<StateActionMeasure> find_phantom_direction(const Model& m);

enum class Verdict { Occupation, Phantom, NotSolution };

const char* to_string(Verdict v);

struct Classification {
  Verdict verdict = Verdict::NotSolution;
  double residual = 0.0;                 // characteristic residual of the input
  std::vector<int> off_support_states;   // support outside the reference measure (Phantom)
};

// Classifies mu against the reference measure: NotSolution when the
// characteristic residual exceeds residual_tol, Occupation when the
// marginal support is dominated by lambda_beta, Phantom otherwise.
Classification classify(const Model& m, const StateActionMeasure& mu,
                        const StateMeasure& lambda_beta, double residual_tol = 1e-8);

// Atomic mutual singularity: the marginal supports are disjoint.
bool singularity_check(const Model& m, const StateActionMeasure& occupation,
                       const StateActionMeasure& invariant);

}  // namespace absorb
