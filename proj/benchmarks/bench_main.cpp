#include <benchmark/benchmark.h>

#include "gapolyak/diffusion.hpp"

namespace {

using namespace gapolyak;

void BM_MetropolisWeights(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto graph = generate_erdos_renyi(n, 0.5, 7);
  for (auto _ : state) {
    auto cm = metropolis_weights(graph);
    benchmark::DoNotOptimize(cm.two_hop.data());
  }
}
BENCHMARK(BM_MetropolisWeights)->Arg(8)->Arg(32)->Arg(128);

void BM_DiffusionIterationGap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto cm = metropolis_weights(generate_erdos_renyi(n, 0.5, 11));
  auto task = generate_regression_task(n, 10, 5, 0.0, 11);
  for (auto _ : state) {
    auto trace = run_atc(task, cm, StepPolicy::gap(2), 10, 3);
    benchmark::DoNotOptimize(trace.data());
  }
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_DiffusionIterationGap)->Arg(8)->Arg(16);

void BM_GraphAwarePolyak(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto cm = metropolis_weights(generate_erdos_renyi(n, 0.5, 13));
  auto task = generate_regression_task(n, 10, 5, 0.0, 13);
  StepSizeSystem system;
  system.two_hop = cm.two_hop;
  system.gaps = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(10);
  for (int k = 0; k < n; ++k) {
    system.gradients.push_back(full_gradient(task, k, w));
    for (int l = 0; l < n; ++l)
      system.gaps(k, l) = -full_objective(task, k, w);
  }
  const StepSizeVector prev = StepSizeVector::Zero(n);
  for (auto _ : state) {
    auto mu = graph_aware_polyak(system, 2, prev);
    benchmark::DoNotOptimize(mu.data());
  }
}
BENCHMARK(BM_GraphAwarePolyak)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
