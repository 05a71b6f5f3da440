#include <doctest.h>

#include <random>
#include <thread>

#include "cbrm/cbr_model.hpp"
#include "cbrm/errors.hpp"
#include "cbrm/markov_chain.hpp"
#include "oracles.hpp"

using namespace cbrm;

namespace {

TransitionMatrix cbr(Rational a, Rational b) {
  return cbr_transition_matrix(CbrParameters::from_return_and_stay(a, b));
}

// Gambler's ruin on {0, 1, 2} with a fair coin; 0 and 2 absorb.
TransitionMatrix gambler() {
  const Rational h(1, 2);
  return validate_stochastic({"0", "1", "2"}, Matrix{{1, 0, 0}, {h, 0, h}, {0, 0, 1}});
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("validate_stochastic") {
  SUBCASE("identity is valid") {
    const auto m = validate_stochastic({"A", "B"}, Matrix::identity(2));
    CHECK(m.size() == 2);
    CHECK(m.index_of("B") == 1u);
    CHECK_FALSE(m.index_of("C"));
  }
  SUBCASE("CBR matrix at 1/3 is valid") {
    CHECK_NOTHROW(cbr(Rational(1, 3), Rational(1, 3)));
  }
  SUBCASE("row sum 5/6 is reported with row and sum") {
    try {
      validate_stochastic({"A", "B"}, Matrix{{Rational(1, 2), Rational(1, 3)}, {0, 1}});
      FAIL("expected RowSumNotOne");
    } catch (const RowSumError& e) {
      CHECK(e.code() == ErrorCode::RowSumNotOne);
      CHECK(e.row() == 0);
      CHECK(e.actual_sum() == "5/6");
    }
  }
  SUBCASE("other errors") {
    CHECK(code_of([] {
            validate_stochastic({"A", "B"}, Matrix{{Rational(3, 2), Rational(-1, 2)}, {0, 1}});
          }) == ErrorCode::NegativeEntry);
    CHECK(code_of([] { validate_stochastic({"A", "A"}, Matrix::identity(2)); }) ==
          ErrorCode::DuplicateLabel);
    CHECK(code_of([] { validate_stochastic({"A"}, Matrix::identity(2)); }) ==
          ErrorCode::DimensionMismatch);
    CHECK(code_of([] { validate_stochastic({}, Matrix()); }) == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("classify_states") {
  const auto c = classify_states(cbr(Rational(1, 3), Rational(1, 3)));
  CHECK(c.absorbing == std::vector<std::string>{"R4"});
  CHECK(c.transient == std::vector<std::string>{"R1", "R2", "R3"});
  CHECK(c.is_absorbing_chain);

  const auto id = classify_states(validate_stochastic({"A", "B"}, Matrix::identity(2)));
  CHECK(id.absorbing.size() == 2);
  CHECK(id.transient.empty());
  CHECK(id.is_absorbing_chain);

  const auto cycle = classify_states(validate_stochastic({"A", "B"}, Matrix{{0, 1}, {1, 0}}));
  CHECK(cycle.absorbing.empty());
  CHECK_FALSE(cycle.is_absorbing_chain);

  // R4 exists but R1..R3 form a closed loop when p34 = 0.
  const auto closed = classify_states(cbr(Rational(1, 2), Rational(1, 2)));
  CHECK(closed.absorbing == std::vector<std::string>{"R4"});
  CHECK_FALSE(closed.is_absorbing_chain);

  // Tiny probabilities still count as edges.
  const Rational eps(BigInt(1), BigInt("1000000000000000000000000"));
  const auto tiny = classify_states(validate_stochastic({"A", "B"}, Matrix{{1 - eps, eps}, {0, 1}}));
  CHECK(tiny.is_absorbing_chain);
}

TEST_CASE("step_distribution and evolve") {
  const auto a = cbr(Rational(1, 3), Rational(1, 3));
  const ProbabilityVector p2(a.states(), {0, 0, 1, 0}, 2);
  const auto p3 = step_distribution(p2, a);
  CHECK(p3.phase_index() == 3);
  CHECK(p3.probs() == std::vector<Rational>{Rational(1, 3), 0, Rational(1, 3), Rational(1, 3)});
  const auto p4 = step_distribution(p3, a);
  CHECK(p4.probs() ==
        std::vector<Rational>{Rational(1, 9), Rational(1, 3), Rational(1, 9), Rational(4, 9)});

  const auto id = validate_stochastic({"A", "B"}, Matrix::identity(2));
  const ProbabilityVector q({"A", "B"}, {Rational(1, 4), Rational(3, 4)}, 5);
  const auto q2 = step_distribution(q, id);
  CHECK(q2.probs() == q.probs());
  CHECK(q2.phase_index() == 6);

  CHECK_THROWS_AS(step_distribution(q, a), Error);

  const auto start = ProbabilityVector::point_mass(a.states(), "R1");
  CHECK(evolve(start, a, 0).size() == 1);
  const auto path = evolve(start, a, 5);
  REQUIRE(path.size() == 6);
  CHECK(path[5].probs() ==
        std::vector<Rational>{Rational(1, 27), Rational(1, 9), Rational(10, 27), Rational(13, 27)});
  CHECK_THROWS_AS(evolve(p2, a, 1), Error);
}

TEST_CASE("ProbabilityVector validation") {
  CHECK_THROWS_AS(ProbabilityVector({"A", "B"}, {Rational(1, 2), Rational(1, 3)}), Error);
  CHECK_THROWS_AS(ProbabilityVector({"A", "B"}, {Rational(3, 2), Rational(-1, 2)}), Error);
  CHECK_THROWS_AS(ProbabilityVector({"A"}, {1, 0}), Error);
  CHECK_THROWS_AS(ProbabilityVector::point_mass({"A"}, "Z"), Error);
}

TEST_CASE("canonical_form") {
  SUBCASE("CBR chain lists R4 first") {
    const Rational a(1, 5), b(2, 5);
    const auto c = canonical_form(cbr(a, b));
    CHECK(c.a_star().states() == std::vector<std::string>{"R4", "R1", "R2", "R3"});
    CHECK(c.order() == std::vector<std::size_t>{3, 0, 1, 2});
    CHECK(c.q_block() == Matrix{{0, 1, 0}, {0, 0, 1}, {a, 0, b}});
    CHECK(c.r_block() == Matrix{{0}, {0}, {1 - a - b}});
    CHECK(c.absorbing_states() == std::vector<std::string>{"R4"});
  }
  SUBCASE("already canonical keeps the identity permutation") {
    const Rational h(1, 2);
    const auto m = validate_stochastic({"A", "B"}, Matrix{{1, 0}, {h, h}});
    CHECK(canonical_form(m).order() == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("two absorbing states come first, stable") {
    const Rational h(1, 2);
    const auto m = validate_stochastic({"x", "L", "y", "W"},
                                       Matrix{{0, h, h, 0}, {0, 1, 0, 0}, {h, 0, 0, h}, {0, 0, 0, 1}});
    const auto c = canonical_form(m);
    CHECK(c.a_star().states() == std::vector<std::string>{"L", "W", "x", "y"});
    CHECK(c.absorbing_count() == 2);
    CHECK(c.transient_count() == 2);
  }
  SUBCASE("errors") {
    CHECK(code_of([] { canonical_form(validate_stochastic({"A", "B"}, Matrix{{0, 1}, {1, 0}})); }) ==
          ErrorCode::NotAbsorbingChain);
    CHECK(code_of([] { canonical_form(validate_stochastic({"A"}, Matrix::identity(1))); }) ==
          ErrorCode::NoTransientStates);
    CHECK(code_of([] { canonical_form(cbr(Rational(1, 2), Rational(1, 2))); }) ==
          ErrorCode::NotAbsorbingChain);
  }
}

TEST_CASE("canonical form un-permutes to the original") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = test::random_params(rng, Rational(1, 100), 50);
    const auto m = cbr_transition_matrix(CbrParameters(p.p31, p.p33, p.p34));
    const auto c = canonical_form(m);
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < m.size(); ++j) {
        CHECK(c.a_star()(c.canonical_index(i), c.canonical_index(j)) == m(i, j));
      }
    }
  }
}

TEST_CASE("fundamental matrix and absorption statistics") {
  SUBCASE("CBR(1/3,1/3,1/3)") {
    const auto c = canonical_form(cbr(Rational(1, 3), Rational(1, 3)));
    CHECK(fundamental_matrix(c) == Matrix{{2, 2, 3}, {1, 2, 3}, {1, 1, 3}});
    CHECK(expected_absorption_steps(c) == std::vector<Rational>{7, 6, 5});
    CHECK(absorption_probabilities(c) == Matrix{{1}, {1}, {1}});
  }
  SUBCASE("CBR(0,0,1): N = I + Q + Q^2") {
    const auto c = canonical_form(cbr(0, 0));
    const Matrix& q = c.q_block();
    CHECK(fundamental_matrix(c) == Matrix::identity(3) + q + q * q);
    CHECK(fundamental_matrix(c) == Matrix{{1, 1, 1}, {0, 1, 1}, {0, 0, 1}});
    CHECK(expected_absorption_steps(c) == std::vector<Rational>{3, 2, 1});
    CHECK(absorption_probabilities(c) == Matrix{{1}, {1}, {1}});
  }
  SUBCASE("CBR(1/4,1/2,1/4)") {
    const auto c = canonical_form(cbr(Rational(1, 4), Rational(1, 2)));
    CHECK(expected_absorption_steps(c)[0] == 8);
  }
  SUBCASE("gambler's ruin splits evenly from the middle") {
    const auto c = canonical_form(gambler());
    CHECK(absorption_probabilities(c) == Matrix{{Rational(1, 2), Rational(1, 2)}});
    CHECK(expected_absorption_steps(c) == std::vector<Rational>{1});
  }
  SUBCASE("p31 + p33 = 1 makes I - Q singular") {
    // canonical_form refuses the chain before inversion is attempted, so the
    // singular block is checked on its own.
    const Rational h(1, 2);
    const Matrix q{{0, 1, 0}, {0, 0, 1}, {h, 0, h}};
    CHECK(code_of([&] { invert(Matrix::identity(3) - q); }) == ErrorCode::SingularMatrix);
    CHECK(code_of([&] { canonical_form(cbr(h, h)); }) == ErrorCode::NotAbsorbingChain);
  }
}

TEST_CASE("first-step equation holds exactly") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = test::random_params(rng, Rational(1, 100), 200);
    const auto c = canonical_form(cbr_transition_matrix(CbrParameters(p.p31, p.p33, p.p34)));
    const auto t = expected_absorption_steps(c);
    const Matrix& q = c.q_block();
    const Matrix& n = c.fundamental();
    CHECK(n * (Matrix::identity(3) - q) == Matrix::identity(3));
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(t[i] > 0);
      Rational rhs = 1;
      for (std::size_t j = 0; j < 3; ++j) rhs += q(i, j) * t[j];
      CHECK(t[i] == rhs);
    }
    for (const auto& s : absorption_probabilities(c).row_sums()) CHECK(s == 1);
  }
}

TEST_CASE("absorbing mass is monotone in the phase") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = test::random_params(rng, Rational(1, 10), 30);
    const auto a = cbr_transition_matrix(CbrParameters(p.p31, p.p33, p.p34));
    const auto path = evolve(ProbabilityVector::point_mass(a.states(), "R1"), a, 40);
    for (std::size_t k = 1; k < path.size(); ++k) {
      CHECK(path[k][3] >= path[k - 1][3]);
      CHECK(path[k][3] <= 1);
    }
    // With p34 >= 1/10 the absorbed mass is close to 1 after 40 phases.
    CHECK(path.back()[3] > Rational(1, 2));
  }
}

TEST_CASE("fundamental matrix is computed once across threads") {
  const auto c = canonical_form(cbr(Rational(1, 3), Rational(1, 3)));
  const CanonicalChain copy = c;
  std::vector<const Matrix*> seen(8);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    pool.emplace_back([&, i] { seen[i] = &(i % 2 ? copy : c).fundamental(); });
  }
  for (auto& t : pool) t.join();
  for (const auto* m : seen) CHECK(m == seen.front());
}
