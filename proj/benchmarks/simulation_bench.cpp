#include <benchmark/benchmark.h>

#include "cbrm/simulate.hpp"

namespace {

void BM_SampleTrajectory(benchmark::State& state) {
  const auto a = cbrm::cbr_transition_matrix(
      cbrm::CbrParameters::from_return_and_stay(cbrm::Rational(1, 3), cbrm::Rational(1, 3)));
  const cbrm::ChainSampler sampler(a);
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.sample(0, cbrm::trajectory_seed(1, i++), 1'000'000));
  }
}
BENCHMARK(BM_SampleTrajectory);

void BM_RunSimulation(benchmark::State& state) {
  const auto a = cbrm::cbr_transition_matrix(
      cbrm::CbrParameters::from_return_and_stay(cbrm::Rational(1, 4), cbrm::Rational(1, 2)));
  cbrm::SimulationConfig cfg;
  cfg.seed = 9;
  cfg.num_trajectories = static_cast<std::uint64_t>(state.range(0));
  cfg.threads = 1;
  const std::vector<std::size_t> phases{4};
  for (auto _ : state) benchmark::DoNotOptimize(cbrm::run_simulation(a, "R1", cfg, phases));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunSimulation)->Arg(1'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace
