#include "cbrm/markov_chain.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <set>

#include "cbrm/errors.hpp"

namespace cbrm {

std::optional<std::size_t> TransitionMatrix::index_of(std::string_view label) const {
  const auto it = std::find(states_.begin(), states_.end(), label);
  if (it == states_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

TransitionMatrix validate_stochastic(std::vector<std::string> states, Matrix raw) {
  const std::size_t n = states.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "chain has no states");
  if (raw.rows() != n || raw.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "matrix is " + std::to_string(raw.rows()) + "x" +
                    std::to_string(raw.cols()) + " but there are " +
                    std::to_string(n) + " states");
  }
  std::set<std::string> seen;
  for (const auto& s : states) {
    if (!seen.insert(s).second) {
      throw Error(ErrorCode::DuplicateLabel, "state '" + s + "' appears twice");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    Rational sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (raw(i, j) < 0) {
        throw Error(ErrorCode::NegativeEntry,
                    "entry (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") = " + to_fraction(raw(i, j)));
      }
      sum += raw(i, j);
    }
    if (sum != 1) throw RowSumError(i, to_fraction(sum));
  }
  return TransitionMatrix(std::move(states), std::move(raw));
}

ProbabilityVector::ProbabilityVector(std::vector<std::string> states,
                                     std::vector<Rational> probs,
                                     std::size_t phase_index)
    : states_(std::move(states)), probs_(std::move(probs)), phase_(phase_index) {
  if (states_.size() != probs_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "probability vector length differs from state count");
  }
  Rational sum = 0;
  for (const auto& p : probs_) {
    if (p < 0 || p > 1) {
      throw Error(ErrorCode::InvalidDistribution,
                  "probability " + to_fraction(p) + " outside [0,1]");
    }
    sum += p;
  }
  if (sum != 1) {
    throw Error(ErrorCode::InvalidDistribution,
                "probabilities sum to " + to_fraction(sum));
  }
}

ProbabilityVector ProbabilityVector::point_mass(const std::vector<std::string>& states,
                                                std::string_view label) {
  const auto it = std::find(states.begin(), states.end(), label);
  if (it == states.end()) {
    throw Error(ErrorCode::UnknownStartState,
                "no state named '" + std::string(label) + "'");
  }
  std::vector<Rational> probs(states.size());
  probs[static_cast<std::size_t>(it - states.begin())] = 1;
  return ProbabilityVector(states, std::move(probs), 0);
}

StateClassification classify_states(const TransitionMatrix& m) {
  const std::size_t n = m.size();
  std::vector<bool> absorbing(n);
  for (std::size_t i = 0; i < n; ++i) absorbing[i] = m(i, i) == 1;

  // Reverse BFS from the absorbing set marks every state that can reach it.
  std::vector<bool> reaches(absorbing);
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    if (absorbing[i]) frontier.push_back(i);
  }
  while (!frontier.empty()) {
    const std::size_t target = frontier.front();
    frontier.pop_front();
    for (std::size_t src = 0; src < n; ++src) {
      if (!reaches[src] && m(src, target) > 0) {
        reaches[src] = true;
        frontier.push_back(src);
      }
    }
  }

  StateClassification out;
  out.is_absorbing_chain = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (absorbing[i]) {
      out.absorbing.push_back(m.states()[i]);
    } else {
      out.transient.push_back(m.states()[i]);
      if (!reaches[i]) out.is_absorbing_chain = false;
    }
  }
  if (out.absorbing.empty()) out.is_absorbing_chain = false;
  return out;
}

ProbabilityVector step_distribution(const ProbabilityVector& p,
                                    const TransitionMatrix& m) {
  if (p.states() != m.states()) {
    throw Error(ErrorCode::StateMismatch,
                "distribution and matrix are over different state lists");
  }
  return ProbabilityVector(p.states(), multiply(p.probs(), m.entries()),
                           p.phase_index() + 1);
}

std::vector<ProbabilityVector> evolve(const ProbabilityVector& start,
                                      const TransitionMatrix& m,
                                      std::size_t phases) {
  if (start.phase_index() != 0) {
    throw Error(ErrorCode::InvalidArgument, "evolution must start at phase 0");
  }
  if (start.states() != m.states()) {
    throw Error(ErrorCode::StateMismatch,
                "distribution and matrix are over different state lists");
  }
  std::vector<ProbabilityVector> out;
  out.reserve(phases + 1);
  out.push_back(start);
  for (std::size_t k = 0; k < phases; ++k) {
    out.push_back(step_distribution(out.back(), m));
  }
  return out;
}

struct CanonicalChain::Cache {
  std::once_flag once;
  Matrix fundamental;
};

CanonicalChain::CanonicalChain(std::vector<std::size_t> order,
                               TransitionMatrix a_star, Matrix q, Matrix r)
    : order_(std::move(order)),
      position_(order_.size()),
      a_star_(std::move(a_star)),
      q_(std::move(q)),
      r_(std::move(r)),
      cache_(std::make_shared<Cache>()) {
  for (std::size_t k = 0; k < order_.size(); ++k) position_[order_[k]] = k;
}

std::vector<std::string> CanonicalChain::absorbing_states() const {
  return {a_star_.states().begin(),
          a_star_.states().begin() + static_cast<std::ptrdiff_t>(absorbing_count())};
}

std::vector<std::string> CanonicalChain::transient_states() const {
  return {a_star_.states().begin() + static_cast<std::ptrdiff_t>(absorbing_count()),
          a_star_.states().end()};
}

const Matrix& CanonicalChain::fundamental() const {
  // A throwing call leaves the flag unset, so a singular Q rethrows every time.
  std::call_once(cache_->once, [this] {
    cache_->fundamental = invert(Matrix::identity(q_.rows()) - q_);
  });
  return cache_->fundamental;
}

CanonicalChain canonical_form(const TransitionMatrix& m) {
  const StateClassification cls = classify_states(m);
  if (!cls.is_absorbing_chain) {
    throw Error(ErrorCode::NotAbsorbingChain,
                cls.absorbing.empty()
                    ? "chain has no absorbing state"
                    : "some transient state cannot reach an absorbing state");
  }
  if (cls.transient.empty()) {
    throw Error(ErrorCode::NoTransientStates, "every state is absorbing");
  }

  const std::size_t n = m.size();
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (m(i, i) == 1) order.push_back(i);
  }
  const std::size_t a = order.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (m(i, i) != 1) order.push_back(i);
  }
  const std::size_t t = n - a;

  std::vector<std::string> labels(n);
  Matrix permuted(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    labels[r] = m.states()[order[r]];
    for (std::size_t c = 0; c < n; ++c) permuted(r, c) = m(order[r], order[c]);
  }

  Matrix q(t, t);
  Matrix r(t, a);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < t; ++j) q(i, j) = permuted(a + i, a + j);
    for (std::size_t k = 0; k < a; ++k) r(i, k) = permuted(a + i, k);
  }
  return CanonicalChain(std::move(order),
                        validate_stochastic(std::move(labels), std::move(permuted)),
                        std::move(q), std::move(r));
}

const Matrix& fundamental_matrix(const CanonicalChain& c) { return c.fundamental(); }

std::vector<Rational> expected_absorption_steps(const CanonicalChain& c) {
  return c.fundamental().row_sums();
}

Matrix absorption_probabilities(const CanonicalChain& c) {
  return c.fundamental() * c.r_block();
}

}  // namespace cbrm
