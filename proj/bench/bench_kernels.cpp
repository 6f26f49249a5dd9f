// Serial reference vs OpenMP kernels for one Bellman sweep, plus episode and
// Monte Carlo throughput.
//
//   bench_kernels --benchmark_filter=Sweep

#include <benchmark/benchmark.h>

#include <omp.h>

#include <memory>
#include <vector>

#include "aoisched/netsim.hpp"
#include "aoisched/solver.hpp"

namespace {

std::vector<aoi::LoopModel> five_loops() {
  std::vector<aoi::LoopModel> loops;
  for (double a : {1.1, 1.3, 1.5, 1.7, 1.9}) loops.push_back(aoi::LoopModel::scalar(a, 1.0, 1.0, a, 0.9));
  return loops;
}

// One MDP per truncation level, built once.
const aoi::TruncatedMdp& mdp_for(std::uint32_t M) {
  static std::vector<std::unique_ptr<aoi::TruncatedMdp>> cache(64);
  if (!cache[M]) {
    const auto loops = five_loops();
    cache[M] = std::make_unique<aoi::TruncatedMdp>(loops, aoi::NetworkConfig{5, 1, M}, aoi::CostKind::error);
  }
  return *cache[M];
}

std::vector<double> warm_values(const aoi::TruncatedMdp& mdp) {
  std::vector<double> J(mdp.space.size(), 0.0), next(J.size());
  for (int k = 0; k < 5; ++k) {
    aoi::kernels::jacobi_sweep(mdp, 0.9, J, next);
    J.swap(next);
  }
  return J;
}

void BM_SweepReference(benchmark::State& state) {
  const auto& mdp = mdp_for(static_cast<std::uint32_t>(state.range(0)));
  const auto J = warm_values(mdp);
  std::vector<double> out(J.size());
  for (auto _ : state) benchmark::DoNotOptimize(aoi::reference::jacobi_sweep(mdp, 0.9, J, out));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(J.size()));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto& mdp = mdp_for(static_cast<std::uint32_t>(state.range(0)));
  const auto J = warm_values(mdp);
  std::vector<double> out(J.size());
  const int saved = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(aoi::kernels::jacobi_sweep(mdp, 0.9, J, out));
  omp_set_num_threads(saved);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(J.size()));
}

void BM_SweepGaussSeidel(benchmark::State& state) {
  const auto& mdp = mdp_for(static_cast<std::uint32_t>(state.range(0)));
  auto J = warm_values(mdp);
  for (auto _ : state) benchmark::DoNotOptimize(aoi::kernels::gauss_seidel_sweep(mdp, 0.9, J));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(J.size()));
}

void BM_Episode(benchmark::State& state) {
  const auto loops = five_loops();
  const aoi::NetworkConfig net{5, 1, 25};
  const auto spec = aoi::greedy_spec(loops, 1, 100);
  aoi::SimConfig sim;
  sim.T = 20000;
  sim.mode = state.range(0) == 0 ? aoi::SimMode::error_recursion : aoi::SimMode::full_state;
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(aoi::run_episode(spec, loops, net, sim, seed++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sim.T));
}

void BM_MonteCarlo(benchmark::State& state) {
  const auto loops = five_loops();
  const aoi::NetworkConfig net{5, 1, 25};
  const auto spec = aoi::greedy_spec(loops, 1, 100);
  aoi::SimConfig sim;
  sim.T = 20000;
  sim.reps = 16;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aoi::run_monte_carlo(spec, loops, net, sim));
  omp_set_num_threads(saved);
  state.SetItemsProcessed(state.iterations() * sim.reps * static_cast<std::int64_t>(sim.T));
}

}  // namespace

BENCHMARK(BM_SweepReference)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)
    ->ArgsProduct({{10, 15, 25}, benchmark::CreateRange(1, 8, 2)})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepGaussSeidel)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Episode)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarlo)->RangeMultiplier(2)->Range(1, 8)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
