#pragma once

// Seeded Monte Carlo sampling of absorbing chains.
//
// Trajectory i draws from std::mt19937_64 seeded with
// trajectory_seed(config.seed, i), so a report depends only on
// (matrix, start, config) and never on thread count or scheduling.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbrm/cbr_model.hpp"
#include "cbrm/markov_chain.hpp"

namespace cbrm {

struct SimulationConfig {
  std::uint64_t seed = 0;
  std::uint64_t num_trajectories = 1;
  /// A path takes at most this many transitions before it is censored.
  std::uint64_t max_phases = 1'000'000;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// splitmix64 finaliser over (seed, index).
std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index) noexcept;

struct SampledPath {
  std::vector<std::size_t> states;  // indices into the matrix's state list
  bool censored = false;

  std::size_t length() const noexcept { return states.size(); }
};

/// Row-wise cumulative sampling tables, built once from the exact matrix.
class ChainSampler {
 public:
  explicit ChainSampler(const TransitionMatrix& m);

  const TransitionMatrix& matrix() const noexcept { return matrix_; }
  SampledPath sample(std::size_t start, std::uint64_t seed,
                     std::uint64_t max_phases) const;

 private:
  struct Bucket {
    double upper;
    std::size_t target;
  };
  TransitionMatrix matrix_;
  std::vector<std::vector<Bucket>> rows_;
  std::vector<bool> absorbing_;
};

/// Throws UnknownStartState.
SampledPath sample_trajectory(const TransitionMatrix& m, std::string_view start,
                              std::uint64_t seed, std::uint64_t max_phases);

/// All num_trajectories paths in index order.
std::vector<SampledPath> sample_paths(const TransitionMatrix& m, std::string_view start,
                                      const SimulationConfig& cfg);

/// Labels a path over the CBR states. Throws StateMismatch if `m` is not over
/// R1..R4, plus the usual trajectory validation errors.
Trajectory as_trajectory(const SampledPath& path, const TransitionMatrix& m);

struct PhaseFrequencies {
  std::size_t phase = 0;
  /// Paths whose state at this phase is known (censored paths shorter than
  /// the phase are excluded).
  std::uint64_t observed = 0;
  std::vector<std::uint64_t> counts;
  std::vector<double> frequencies;

  friend bool operator==(const PhaseFrequencies&, const PhaseFrequencies&) = default;
};

struct SimulationReport {
  std::vector<std::string> states;
  std::string start;
  std::uint64_t seed = 0;
  std::uint64_t num_trajectories = 0;
  std::uint64_t max_phases = 0;
  std::uint64_t absorbed_count = 0;
  std::uint64_t censored_count = 0;
  /// Mean path length (phases through absorption inclusive) over absorbed
  /// paths; absent if none absorbed.
  std::optional<double> empirical_mean_steps;
  /// Standard error of that mean; absent with fewer than two absorbed paths.
  std::optional<double> standard_error;
  std::vector<PhaseFrequencies> phase_distributions;
  /// transition_counts[i][j]: observed i -> j moves over all paths.
  std::vector<std::vector<std::uint64_t>> transition_counts;

  /// Row of transition_counts for `state`. Throws UnknownStartState.
  const std::vector<std::uint64_t>& exit_counts(std::string_view state) const;

  friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

/// Throws UnknownStartState, or InvalidArgument for a zero trajectory count
/// or zero max_phases.
SimulationReport run_simulation(const TransitionMatrix& m, std::string_view start,
                                const SimulationConfig& cfg,
                                std::span<const std::size_t> phases_of_interest);

/// R3 exit counts for a report over the CBR states.
R3ExitCounts exit_counts_from_r3(const SimulationReport& report);

/// JSON rendering, same structured-text family as library documents.
std::string report_to_json(const SimulationReport& report);

}  // namespace cbrm
