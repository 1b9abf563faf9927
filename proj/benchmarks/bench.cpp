#include <benchmark/benchmark.h>

#include "absorb/absorption.hpp"
#include "absorb/characteristic.hpp"
#include "absorb/io.hpp"
#include "absorb/montecarlo.hpp"

namespace {

void BM_OccupationSolve(benchmark::State& state) {
  absorb::Model m = absorb::fixture_phantom(static_cast<int>(state.range(0)), 0.5);
  absorb::StationaryPolicy policy = absorb::StationaryPolicy::uniform(m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(absorb::occupation_measure(m, policy));
  }
}
BENCHMARK(BM_OccupationSolve)->Arg(16)->Arg(64)->Arg(256);

void BM_PhantomSearch(benchmark::State& state) {
  absorb::Model m = absorb::fixture_phantom(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(absorb::find_phantom_direction(m));
  }
}
BENCHMARK(BM_PhantomSearch)->Arg(16)->Arg(64);

void BM_ReferenceMeasure(benchmark::State& state) {
  absorb::Model m = absorb::fixture_tree(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(absorb::reference_measure(m));
  }
}
BENCHMARK(BM_ReferenceMeasure)->Arg(4)->Arg(7);

void BM_Simulate(benchmark::State& state) {
  absorb::Model m = absorb::fixture_tree(6);
  absorb::StationaryPolicy policy = absorb::StationaryPolicy::uniform(m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(absorb::estimate_occupation(m, policy, state.range(0), 42));
  }
}
BENCHMARK(BM_Simulate)->Arg(1000)->Arg(10000);

void BM_Decompose(benchmark::State& state) {
  absorb::Model m = absorb::fixture_phantom(static_cast<int>(state.range(0)), 0.5);
  absorb::StateActionMeasure mu =
      absorb::occupation_measure(m, absorb::StationaryPolicy::uniform(m));
  mu.add(m.find_state("-1"), 0, 1.0);
  mu.add(m.find_state("-2"), 0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(absorb::decompose(m, mu));
  }
}
BENCHMARK(BM_Decompose)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
