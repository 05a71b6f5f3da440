#include "cbrm/cbr_model.hpp"

#include "cbrm/errors.hpp"

namespace cbrm {

std::string_view label(Step s) noexcept {
  return kStepLabels[static_cast<std::size_t>(s)];
}

Step parse_step(std::string_view text) {
  for (std::size_t i = 0; i < kStepLabels.size(); ++i) {
    if (kStepLabels[i] == text) return static_cast<Step>(i);
  }
  throw Error(ErrorCode::UnknownLabel, "'" + std::string(text) + "' is not one of R1..R4");
}

const std::vector<std::string>& cbr_states() {
  static const std::vector<std::string> states(kStepLabels.begin(), kStepLabels.end());
  return states;
}

CbrParameters::CbrParameters(Rational p31, Rational p33, Rational p34)
    : p31_(std::move(p31)), p33_(std::move(p33)), p34_(std::move(p34)) {
  for (const Rational* v : {&p31_, &p33_, &p34_}) {
    if (*v < 0 || *v > 1) {
      throw Error(ErrorCode::InvalidParameters,
                  "probability " + to_fraction(*v) + " outside [0,1]");
    }
  }
  const Rational sum = p31_ + p33_ + p34_;
  if (sum != 1) {
    throw Error(ErrorCode::InvalidParameters,
                "p31 + p33 + p34 = " + to_fraction(sum) + ", expected 1");
  }
}

CbrParameters CbrParameters::from_return_and_stay(Rational p31, Rational p33) {
  Rational p34 = 1 - p31 - p33;
  return CbrParameters(std::move(p31), std::move(p33), std::move(p34));
}

TransitionMatrix cbr_transition_matrix(const CbrParameters& p) {
  Matrix a{
      {0, 1, 0, 0},
      {0, 0, 1, 0},
      {p.p31(), 0, p.p33(), p.p34()},
      {0, 0, 0, 1},
  };
  return validate_stochastic(cbr_states(), std::move(a));
}

Rational mean_phases(const CbrParameters& p) {
  if (!p.is_absorbing()) {
    throw Error(ErrorCode::NonAbsorbing, "p34 = 0, R4 is never reached");
  }
  return (3 - 2 * p.p33()) / (1 - p.p31() - p.p33());
}

Rational completion_steps(const CbrParameters& p) { return mean_phases(p) + 1; }

ProbabilityVector phase_distribution(const CbrParameters& p, std::size_t phase) {
  const TransitionMatrix a = cbr_transition_matrix(p);
  ProbabilityVector v = ProbabilityVector::point_mass(a.states(), "R1");
  for (std::size_t k = 0; k < phase; ++k) v = step_distribution(v, a);
  return v;
}

std::vector<std::string> Trajectory::labels() const {
  std::vector<std::string> out;
  out.reserve(phases_.size());
  for (Step s : phases_) out.emplace_back(label(s));
  return out;
}

bool is_flow_edge(Step from, Step to) noexcept {
  switch (from) {
    case Step::R1: return to == Step::R2;
    case Step::R2: return to == Step::R3;
    case Step::R3: return to == Step::R1 || to == Step::R3 || to == Step::R4;
    case Step::R4: return false;
  }
  return false;
}

Trajectory validate_trajectory(std::span<const Step> raw) {
  if (raw.empty()) throw Error(ErrorCode::EmptyTrajectory, "no phases");
  if (raw.front() != Step::R1) {
    throw Error(ErrorCode::DoesNotStartAtR1,
                "starts at " + std::string(label(raw.front())));
  }
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (!is_flow_edge(raw[i - 1], raw[i])) {
      throw IllegalTransitionError(i, std::string(label(raw[i - 1])),
                                   std::string(label(raw[i])));
    }
  }
  return Trajectory(std::vector<Step>(raw.begin(), raw.end()));
}

Trajectory validate_trajectory(std::span<const std::string> raw) {
  std::vector<Step> steps;
  steps.reserve(raw.size());
  for (const auto& s : raw) steps.push_back(parse_step(s));
  return validate_trajectory(std::span<const Step>(steps));
}

std::size_t trajectory_step_count(const Trajectory& t) {
  if (!t.absorbed()) {
    throw Error(ErrorCode::NotAbsorbed, "trajectory ends at " +
                                            std::string(label(t.phases().back())));
  }
  return t.size();
}

R3ExitCounts count_r3_exits(const Trajectory& t) {
  R3ExitCounts c;
  const auto& ph = t.phases();
  for (std::size_t i = 1; i < ph.size(); ++i) {
    if (ph[i - 1] != Step::R3) continue;
    switch (ph[i]) {
      case Step::R1: ++c.to_r1; break;
      case Step::R3: ++c.stay; break;
      case Step::R4: ++c.to_r4; break;
      case Step::R2: break;  // unreachable for validated trajectories
    }
  }
  return c;
}

EstimationResult estimate_parameters(std::span<const Trajectory> trajectories) {
  R3ExitCounts counts;
  for (const auto& t : trajectories) counts += count_r3_exits(t);
  const std::uint64_t total = counts.total();
  if (total == 0) {
    throw Error(ErrorCode::NoR3Observations, "no transition out of R3 was observed");
  }
  auto ratio = [total](std::uint64_t k) { return Rational(BigInt(k), BigInt(total)); };
  return {CbrParameters(ratio(counts.to_r1), ratio(counts.stay), ratio(counts.to_r4)),
          counts};
}

}  // namespace cbrm
