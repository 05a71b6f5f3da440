#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "cbrm/errors.hpp"
#include "cbrm/simulate.hpp"

using namespace cbrm;

namespace {

TransitionMatrix cbr(Rational a, Rational b) {
  return cbr_transition_matrix(CbrParameters::from_return_and_stay(a, b));
}

const Rational third(1, 3);

}  // namespace

TEST_CASE("std::mt19937_64 reference output") {
  // The standard fixes the 10000th output of a default-seeded engine.
  std::mt19937_64 rng;
  rng.discard(9999);
  CHECK(rng() == 9981545732273789042ULL);
}

TEST_CASE("trajectory seeds are deterministic and distinct") {
  CHECK(trajectory_seed(42, 0) == trajectory_seed(42, 0));
  CHECK(trajectory_seed(42, 0) != trajectory_seed(42, 1));
  CHECK(trajectory_seed(42, 0) != trajectory_seed(43, 0));
  // splitmix64 reference: first output from state 0 is 0xE220A8397B1DCDAF.
  CHECK(trajectory_seed(0, 0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("sample_trajectory") {
  SUBCASE("deterministic chain") {
    const auto m = cbr(0, 0);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto p = sample_trajectory(m, "R1", s, 100);
      CHECK(p.states == std::vector<std::size_t>{0, 1, 2, 3});
      CHECK_FALSE(p.censored);
    }
  }
  SUBCASE("same seed, same path") {
    const auto m = cbr(third, third);
    CHECK(sample_trajectory(m, "R1", 99, 1000).states == sample_trajectory(m, "R1", 99, 1000).states);
  }
  SUBCASE("paths follow positive-probability edges and end absorbed") {
    const auto m = cbr(Rational(1, 4), Rational(1, 2));
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto p = sample_trajectory(m, "R1", s, 1'000'000);
      CHECK_FALSE(p.censored);
      CHECK(p.states.back() == 3);
      for (std::size_t i = 1; i < p.length(); ++i) CHECK(m(p.states[i - 1], p.states[i]) > 0);
      CHECK_NOTHROW(as_trajectory(p, m));
    }
  }
  SUBCASE("censoring") {
    const auto m = cbr(0, 0);
    const auto p = sample_trajectory(m, "R1", 1, 2);
    CHECK(p.censored);
    CHECK(p.states == std::vector<std::size_t>{0, 1, 2});
  }
  SUBCASE("absorbing start") {
    const auto p = sample_trajectory(cbr(third, third), "R4", 1, 10);
    CHECK(p.states == std::vector<std::size_t>{3});
    CHECK_FALSE(p.censored);
  }
  SUBCASE("unknown start") {
    try {
      sample_trajectory(cbr(third, third), "R9", 1, 10);
      FAIL("expected UnknownStartState");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownStartState);
    }
  }
}

TEST_CASE("run_simulation is independent of thread count") {
  const auto m = cbr(third, third);
  const std::vector<std::size_t> phases{0, 3, 4, 5, 50};
  SimulationConfig cfg;
  cfg.seed = 2024;
  cfg.num_trajectories = 5000;
  cfg.threads = 1;
  const auto serial = run_simulation(m, "R1", cfg, phases);
  for (unsigned t : {2u, 3u, 8u}) {
    cfg.threads = t;
    CHECK(run_simulation(m, "R1", cfg, phases) == serial);
  }
  CHECK(report_to_json(serial) == report_to_json(run_simulation(m, "R1", cfg, phases)));

  cfg.seed = 2025;
  CHECK_FALSE(run_simulation(m, "R1", cfg, phases) == serial);

  std::vector<SampledPath> paths = sample_paths(m, "R1", cfg);
  CHECK(paths.size() == 5000);
  CHECK(paths[17].states == sample_trajectory(m, "R1", trajectory_seed(2025, 17), cfg.max_phases).states);
}

TEST_CASE("report invariants") {
  const auto m = cbr(Rational(1, 4), Rational(1, 2));
  SimulationConfig cfg;
  cfg.seed = 7;
  cfg.num_trajectories = 4000;
  cfg.max_phases = 6;  // forces some censoring
  const std::vector<std::size_t> phases{0, 2, 4, 6, 10};
  const auto r = run_simulation(m, "R1", cfg, phases);
  CHECK(r.censored_count > 0);
  CHECK(r.censored_count + r.absorbed_count == cfg.num_trajectories);
  for (const auto& pf : r.phase_distributions) {
    double sum = 0;
    for (double f : pf.frequencies) sum += f;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  CHECK(r.phase_distributions[0].frequencies[0] == 1.0);
  // Phase 10 is beyond every censored path, so only absorbed ones count.
  CHECK(r.phase_distributions[4].observed == r.absorbed_count);
  CHECK(r.phase_distributions[4].frequencies[3] == 1.0);
  // Absorbed paths have length >= 4, censored ones exactly 7 states.
  CHECK(*r.empirical_mean_steps >= 4.0);
  CHECK(*r.empirical_mean_steps <= 7.0);

  const auto exits = exit_counts_from_r3(r);
  CHECK(exits.to_r4 == r.absorbed_count);
}

TEST_CASE("single trajectory report") {
  SimulationConfig cfg;
  cfg.seed = 5;
  cfg.num_trajectories = 1;
  const auto m = cbr(third, third);
  const std::vector<std::size_t> phases{0};
  const auto r = run_simulation(m, "R1", cfg, phases);
  const auto path = sample_trajectory(m, "R1", trajectory_seed(5, 0), cfg.max_phases);
  REQUIRE(r.empirical_mean_steps.has_value());
  CHECK(*r.empirical_mean_steps == static_cast<double>(path.length()));
  CHECK_FALSE(r.standard_error.has_value());

  const auto doc = nlohmann::json::parse(report_to_json(r));
  CHECK(doc["standard_error"].is_null());
  CHECK(doc["num_trajectories"] == 1);
}

TEST_CASE("run_simulation argument errors") {
  const auto m = cbr(third, third);
  SimulationConfig cfg;
  cfg.num_trajectories = 0;
  CHECK_THROWS_AS(run_simulation(m, "R1", cfg, {}), Error);
  cfg.num_trajectories = 1;
  cfg.max_phases = 0;
  CHECK_THROWS_AS(run_simulation(m, "R1", cfg, {}), Error);
  cfg.max_phases = 10;
  CHECK_THROWS_AS(run_simulation(m, "nowhere", cfg, {}), Error);
}

TEST_CASE("simulated exit ratios approach the parameters") {
  const auto m = cbr(Rational(1, 5), Rational(3, 10));
  SimulationConfig cfg;
  cfg.seed = 11;
  cfg.num_trajectories = 20'000;
  const auto r = run_simulation(m, "R1", cfg, {});
  const auto e = exit_counts_from_r3(r);
  const double total = static_cast<double>(e.total());
  CHECK(std::abs(e.to_r1 / total - 0.2) < 0.01);
  CHECK(std::abs(e.stay / total - 0.3) < 0.01);
  CHECK(std::abs(e.to_r4 / total - 0.5) < 0.01);
  // t + 1 = (3 - 0.6) / 0.5 + 1 = 5.8
  CHECK(std::abs(*r.empirical_mean_steps - 5.8) < 3 * *r.standard_error);
}

TEST_CASE("general chains: gambler's ruin") {
  const Rational h(1, 2);
  const auto m = validate_stochastic({"0", "1", "2"}, Matrix{{1, 0, 0}, {h, 0, h}, {0, 0, 1}});
  SimulationConfig cfg;
  cfg.seed = 3;
  cfg.num_trajectories = 10'000;
  const std::vector<std::size_t> phases{1};
  const auto r = run_simulation(m, "1", cfg, phases);
  CHECK(*r.empirical_mean_steps == 2.0);
  CHECK(*r.standard_error == 0.0);
  const auto& f = r.phase_distributions[0].frequencies;
  CHECK(std::abs(f[0] - 0.5) < 3 * std::sqrt(0.25 / 10'000));
  CHECK_THROWS_AS(exit_counts_from_r3(r), Error);
}
