#include <benchmark/benchmark.h>

#include <random>

#include "nhmart/experiments.hpp"
#include "nhmart/operator_norm.hpp"
#include "nhmart/stopping.hpp"

using namespace nhmart;

namespace {

StepFunction random_function(const Lattice& lat, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(lat.leaf_count());
  for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  return StepFunction(lat, v);
}

}  // namespace

static void BM_Decompose(benchmark::State& state) {
  Lattice lat = uniform_radic(2, static_cast<int>(state.range(0)), 1.0);
  StepFunction f = random_function(lat, 1);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(f));
}
BENCHMARK(BM_Decompose)->Arg(6)->Arg(9)->Arg(12);

static void BM_AssemblePi(benchmark::State& state) {
  Lattice lat = uniform_radic(2, static_cast<int>(state.range(0)), 1.0);
  StepFunction b = random_function(lat, 2);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(OperatorKind::pi, b, lat));
}
BENCHMARK(BM_AssemblePi)->Arg(4)->Arg(6)->Arg(8);

static void BM_Norm2(benchmark::State& state) {
  Lattice lat = uniform_radic(2, static_cast<int>(state.range(0)), 1.0);
  StepFunction b = random_function(lat, 3);
  LinearOp op = assemble(OperatorKind::pi, b, lat);
  for (auto _ : state) benchmark::DoNotOptimize(norm_2(op));
}
BENCHMARK(BM_Norm2)->Arg(4)->Arg(6);

static void BM_StoppingGenerations(benchmark::State& state) {
  Lattice lat = uniform_radic(2, static_cast<int>(state.range(0)), 1.0);
  StepFunction f = random_function(lat, 4);
  f.values = f.values.cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(stopping_generations(f, -3));
}
BENCHMARK(BM_StoppingGenerations)->Arg(6)->Arg(9)->Arg(12);

static void BM_CommutatorExperiment(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(run_commutator_experiment({0.25}, 2.0, 10.0));
}
BENCHMARK(BM_CommutatorExperiment);

BENCHMARK_MAIN();
