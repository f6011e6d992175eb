#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "shl/dense_oracle.hpp"
#include "shl/nonlinear.hpp"
#include "shl/radial_pde.hpp"
#include "shl/steady_states.hpp"

namespace {

const shl::ExponentSet& exps() {
  static const shl::ExponentSet e = shl::compute_exponents({11, 7});
  return e;
}

shl::RadialField bump(const shl::LogGrid& g) {
  return shl::RadialField::from_w(g, exps().sigma, 0.0, [](double r) { return shl::smooth_bump(r, 1.0, 3.0); });
}

void BM_StepImplicitLinear(benchmark::State& state) {
  const shl::LogGrid g{std::log(1e-6), std::log(1e4), static_cast<int>(state.range(0))};
  const shl::RadialOperator op = shl::assemble_operator(g, exps());
  shl::RadialField f = bump(g);
  for (auto _ : state) {
    f = shl::step_implicit(f, op, {}, 1e-3);
    benchmark::DoNotOptimize(f.W.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StepImplicitLinear)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_StepImplicitNonlinear(benchmark::State& state) {
  const shl::LogGrid g{std::log(1e-6), std::log(1e4), static_cast<int>(state.range(0))};
  const shl::RadialOperator op = shl::nonlinear_operator(g, exps());
  const shl::Reaction reaction = shl::nonlinear_reaction(op, exps());
  const shl::RadialField f = shl::sample_initial(shl::InitialDataSpec::power_tail(0.1, 5.0), exps(), g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(shl::step_implicit(f, op, reaction, 1e-13).W.data());
  }
}
BENCHMARK(BM_StepImplicitNonlinear)->Arg(2048)->Arg(8192);

void BM_EvolveLinear(benchmark::State& state) {
  const shl::LogGrid g{std::log(1e-6), std::log(1e4), 2048};
  const shl::RadialOperator op = shl::assemble_operator(g, exps());
  const shl::RadialField f = bump(g);
  shl::EvolutionConfig time;
  time.t1 = static_cast<double>(state.range(0));
  time.snapshot_times = {time.t1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(shl::evolve(f, op, {}, time).snapshots.data());
  }
}
BENCHMARK(BM_EvolveLinear)->Arg(1)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DenseOracle(benchmark::State& state) {
  const shl::LogGrid g{std::log(1e-2), std::log(1e2), static_cast<int>(state.range(0))};
  const shl::RadialOperator op = shl::assemble_operator(g, exps());
  for (auto _ : state) {
    benchmark::DoNotOptimize(shl::dense_oracle(op, 1.0).matrix().data());
  }
}
BENCHMARK(BM_DenseOracle)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_Psi1(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(shl::integrate_psi1(exps().params, 300.0, 1e-10).values().data());
  }
}
BENCHMARK(BM_Psi1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
