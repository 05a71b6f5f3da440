#pragma once

// The four-step Retrieve/Reuse/Revise/Retain chain.
//
//   R1 -> R2 -> R3 -> R4 (absorbing)
//                |
//                +-> R1 (return, p31), R3 (stay, p33), R4 (retain, p34)

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbrm/markov_chain.hpp"
#include "cbrm/rational.hpp"

namespace cbrm {

enum class Step : std::uint8_t { R1 = 0, R2 = 1, R3 = 2, R4 = 3 };

inline constexpr std::array<std::string_view, 4> kStepLabels = {"R1", "R2", "R3", "R4"};

std::string_view label(Step s) noexcept;
/// Throws Error(UnknownLabel).
Step parse_step(std::string_view label);
const std::vector<std::string>& cbr_states();

/// Exit probabilities out of R3. The triple always sums to exactly 1.
class CbrParameters {
 public:
  /// Throws InvalidParameters unless each value is in [0,1] and they sum to 1.
  CbrParameters(Rational p31, Rational p33, Rational p34);

  /// p34 derived as 1 - p31 - p33.
  static CbrParameters from_return_and_stay(Rational p31, Rational p33);

  const Rational& p31() const noexcept { return p31_; }
  const Rational& p33() const noexcept { return p33_; }
  const Rational& p34() const noexcept { return p34_; }
  bool is_absorbing() const noexcept { return p34_ > 0; }

  friend bool operator==(const CbrParameters&, const CbrParameters&) = default;

 private:
  Rational p31_, p33_, p34_;
};

TransitionMatrix cbr_transition_matrix(const CbrParameters& p);

/// Mean phases before absorption from R1: (3 - 2 p33) / (1 - p31 - p33).
/// Throws NonAbsorbing when p34 = 0.
Rational mean_phases(const CbrParameters& p);

/// Mean steps for completion, mean_phases + 1.
Rational completion_steps(const CbrParameters& p);

/// P_i starting from P_0 = [1 0 0 0].
ProbabilityVector phase_distribution(const CbrParameters& p, std::size_t phase);

/// A walk along the flow diagram starting at R1. May stop before R4
/// (censored observation); R4, if present, is the final element.
class Trajectory {
 public:
  const std::vector<Step>& phases() const noexcept { return phases_; }
  std::size_t size() const noexcept { return phases_.size(); }
  bool absorbed() const noexcept { return phases_.back() == Step::R4; }
  std::vector<std::string> labels() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  friend Trajectory validate_trajectory(std::span<const Step> raw);
  explicit Trajectory(std::vector<Step> phases) : phases_(std::move(phases)) {}
  std::vector<Step> phases_;
};

bool is_flow_edge(Step from, Step to) noexcept;

/// Throws EmptyTrajectory, DoesNotStartAtR1, IllegalTransitionError or
/// (for the label overload) UnknownLabel.
Trajectory validate_trajectory(std::span<const Step> raw);
Trajectory validate_trajectory(std::span<const std::string> raw);

/// Number of phases through absorption inclusive, i.e. 1 + transitions.
/// Throws NotAbsorbed.
std::size_t trajectory_step_count(const Trajectory& t);

struct R3ExitCounts {
  std::uint64_t to_r1 = 0;
  std::uint64_t stay = 0;
  std::uint64_t to_r4 = 0;

  std::uint64_t total() const noexcept { return to_r1 + stay + to_r4; }
  R3ExitCounts& operator+=(const R3ExitCounts& o) noexcept {
    to_r1 += o.to_r1;
    stay += o.stay;
    to_r4 += o.to_r4;
    return *this;
  }
  friend bool operator==(const R3ExitCounts&, const R3ExitCounts&) = default;
};

R3ExitCounts count_r3_exits(const Trajectory& t);

struct EstimationResult {
  CbrParameters params;
  R3ExitCounts r3_exit_counts;
};

/// Maximum likelihood by exit frequencies out of R3, no smoothing. Censored
/// trajectories contribute the exits they show. Throws NoR3Observations.
EstimationResult estimate_parameters(std::span<const Trajectory> trajectories);

}  // namespace cbrm
