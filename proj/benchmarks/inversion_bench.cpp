#include <benchmark/benchmark.h>

#include "cbrm/cbr_model.hpp"
#include "cbrm/markov_chain.hpp"

namespace {

// Birth-death chain on n states with absorbing ends, p = 1/3 up, 2/3 down.
cbrm::TransitionMatrix birth_death(std::size_t n) {
  cbrm::Matrix m(n, n);
  m(0, 0) = 1;
  m(n - 1, n - 1) = 1;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    m(i, i + 1) = cbrm::Rational(1, 3);
    m(i, i - 1) = cbrm::Rational(2, 3);
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
  return cbrm::validate_stochastic(std::move(labels), std::move(m));
}

void BM_CbrFundamental(benchmark::State& state) {
  const auto p = cbrm::CbrParameters::from_return_and_stay(cbrm::Rational(2, 7), cbrm::Rational(3, 11));
  const auto a = cbrm::cbr_transition_matrix(p);
  for (auto _ : state) {
    const auto chain = cbrm::canonical_form(a);
    benchmark::DoNotOptimize(cbrm::expected_absorption_steps(chain));
  }
}
BENCHMARK(BM_CbrFundamental);

void BM_ClosedFormMeanPhases(benchmark::State& state) {
  const auto p = cbrm::CbrParameters::from_return_and_stay(cbrm::Rational(2, 7), cbrm::Rational(3, 11));
  for (auto _ : state) benchmark::DoNotOptimize(cbrm::mean_phases(p));
}
BENCHMARK(BM_ClosedFormMeanPhases);

void BM_BirthDeathFundamental(benchmark::State& state) {
  const auto m = birth_death(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    const auto chain = cbrm::canonical_form(m);
    benchmark::DoNotOptimize(cbrm::absorption_probabilities(chain));
  }
}
BENCHMARK(BM_BirthDeathFundamental)->RangeMultiplier(2)->Range(4, 32);

void BM_Evolve(benchmark::State& state) {
  const auto p = cbrm::CbrParameters::from_return_and_stay(cbrm::Rational(1, 3), cbrm::Rational(1, 3));
  const auto a = cbrm::cbr_transition_matrix(p);
  const auto start = cbrm::ProbabilityVector::point_mass(a.states(), "R1");
  for (auto _ : state) {
    benchmark::DoNotOptimize(cbrm::evolve(start, a, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_Evolve)->Arg(5)->Arg(50);

}  // namespace
