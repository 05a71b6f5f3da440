#pragma once

// General finite absorbing Markov chain engine over exact rationals.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbrm/matrix.hpp"
#include "cbrm/rational.hpp"

namespace cbrm {

/// Labelled row-stochastic square matrix. Entry (i, j) is the probability of
/// moving from state i to state j in one phase. Only obtainable through
/// validate_stochastic, so every instance is valid.
class TransitionMatrix {
 public:
  const std::vector<std::string>& states() const noexcept { return states_; }
  const Matrix& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return states_.size(); }
  const Rational& operator()(std::size_t from, std::size_t to) const {
    return entries_(from, to);
  }
  std::optional<std::size_t> index_of(std::string_view label) const;

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  friend TransitionMatrix validate_stochastic(std::vector<std::string> states,
                                              Matrix raw);
  TransitionMatrix(std::vector<std::string> states, Matrix entries)
      : states_(std::move(states)), entries_(std::move(entries)) {}

  std::vector<std::string> states_;
  Matrix entries_;
};

/// Checks squareness, label uniqueness, non-negativity and exact unit row
/// sums. Throws DimensionMismatch, DuplicateLabel, NegativeEntry or
/// RowSumError (RowSumNotOne).
TransitionMatrix validate_stochastic(std::vector<std::string> states, Matrix raw);

/// Distribution over chain states at phase `phase_index`.
class ProbabilityVector {
 public:
  /// Throws DimensionMismatch or InvalidDistribution (entry outside [0,1] or
  /// sum different from 1).
  ProbabilityVector(std::vector<std::string> states, std::vector<Rational> probs,
                    std::size_t phase_index = 0);

  /// All mass on `label`. Throws UnknownStartState if absent.
  static ProbabilityVector point_mass(const std::vector<std::string>& states,
                                      std::string_view label);

  const std::vector<std::string>& states() const noexcept { return states_; }
  const std::vector<Rational>& probs() const noexcept { return probs_; }
  std::size_t phase_index() const noexcept { return phase_; }
  const Rational& operator[](std::size_t i) const { return probs_[i]; }

  friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;

 private:
  std::vector<std::string> states_;
  std::vector<Rational> probs_;
  std::size_t phase_;
};

struct StateClassification {
  std::vector<std::string> absorbing;  // original order
  std::vector<std::string> transient;  // original order
  bool is_absorbing_chain = false;
};

/// Absorbing states have self-loop probability 1. The chain is absorbing when
/// every transient state reaches an absorbing state along positive-probability
/// edges (breadth-first search; magnitudes are irrelevant).
StateClassification classify_states(const TransitionMatrix& m);

/// P_{i+1} = P_i * A. Throws StateMismatch unless labels match in order.
ProbabilityVector step_distribution(const ProbabilityVector& p,
                                    const TransitionMatrix& m);

/// [P_0, ..., P_phases]. `start` must be at phase 0 (InvalidArgument).
std::vector<ProbabilityVector> evolve(const ProbabilityVector& start,
                                      const TransitionMatrix& m,
                                      std::size_t phases);

/// Canonical form A* = [I 0; R Q]: absorbing states first, each group in its
/// original relative order.
class CanonicalChain {
 public:
  /// order()[k] is the original index of the state at canonical position k.
  const std::vector<std::size_t>& order() const noexcept { return order_; }
  /// Canonical position of original state `original`.
  std::size_t canonical_index(std::size_t original) const {
    return position_[original];
  }

  const TransitionMatrix& a_star() const noexcept { return a_star_; }
  const Matrix& q_block() const noexcept { return q_; }
  const Matrix& r_block() const noexcept { return r_; }
  std::size_t absorbing_count() const noexcept { return r_.cols(); }
  std::size_t transient_count() const noexcept { return q_.rows(); }
  std::vector<std::string> absorbing_states() const;
  std::vector<std::string> transient_states() const;

  /// N = (I - Q)^-1, computed on first use and shared by copies.
  /// Throws SingularMatrix.
  const Matrix& fundamental() const;

 private:
  friend CanonicalChain canonical_form(const TransitionMatrix& m);
  CanonicalChain(std::vector<std::size_t> order, TransitionMatrix a_star,
                 Matrix q, Matrix r);

  struct Cache;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> position_;
  TransitionMatrix a_star_;
  Matrix q_;
  Matrix r_;
  std::shared_ptr<Cache> cache_;
};

/// Throws NotAbsorbingChain or NoTransientStates.
CanonicalChain canonical_form(const TransitionMatrix& m);

const Matrix& fundamental_matrix(const CanonicalChain& c);

/// Row sums of N: mean number of phases before absorption from each
/// transient state, in canonical transient order.
std::vector<Rational> expected_absorption_steps(const CanonicalChain& c);

/// B = N * R, rows transient, columns absorbing (canonical order).
Matrix absorption_probabilities(const CanonicalChain& c);

}  // namespace cbrm
