#include "cbrm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include <json.hpp>

#include "cbrm/errors.hpp"

namespace cbrm {

namespace {

using Wide = boost::multiprecision::uint128_t;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t require_state(const TransitionMatrix& m, std::string_view start) {
  const auto idx = m.index_of(start);
  if (!idx) {
    throw Error(ErrorCode::UnknownStartState,
                "no state named '" + std::string(start) + "'");
  }
  return *idx;
}

unsigned worker_count(const SimulationConfig& cfg) {
  unsigned t = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  if (t == 0) t = 1;
  return static_cast<unsigned>(
      std::min<std::uint64_t>(t, std::max<std::uint64_t>(cfg.num_trajectories, 1)));
}

// Runs body(lo, hi, worker) over contiguous index blocks.
template <class Body>
void parallel_blocks(std::uint64_t count, unsigned workers, Body&& body) {
  if (workers <= 1) {
    body(std::uint64_t{0}, count, 0u);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::uint64_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = std::min(count, w * chunk);
    const std::uint64_t hi = std::min(count, lo + chunk);
    pool.emplace_back([&body, lo, hi, w] { body(lo, hi, w); });
  }
  for (auto& t : pool) t.join();
}

// Integer-only aggregates, so merging partial results is order independent.
struct Tally {
  std::uint64_t absorbed = 0;
  std::uint64_t censored = 0;
  Wide length_sum = 0;
  Wide length_sq_sum = 0;
  std::vector<std::uint64_t> phase_observed;
  std::vector<std::vector<std::uint64_t>> phase_counts;
  std::vector<std::vector<std::uint64_t>> transitions;

  Tally(std::size_t n, std::size_t phases)
      : phase_observed(phases),
        phase_counts(phases, std::vector<std::uint64_t>(n)),
        transitions(n, std::vector<std::uint64_t>(n)) {}

  void add(const SampledPath& p, std::span<const std::size_t> phases) {
    if (p.censored) {
      ++censored;
    } else {
      ++absorbed;
      length_sum += p.length();
      length_sq_sum += Wide(p.length()) * p.length();
    }
    for (std::size_t k = 0; k < phases.size(); ++k) {
      const std::size_t ph = phases[k];
      if (ph < p.length()) {
        ++phase_observed[k];
        ++phase_counts[k][p.states[ph]];
      } else if (!p.censored) {
        ++phase_observed[k];
        ++phase_counts[k][p.states.back()];
      }
    }
    for (std::size_t i = 1; i < p.length(); ++i) ++transitions[p.states[i - 1]][p.states[i]];
  }

  void merge(const Tally& o) {
    absorbed += o.absorbed;
    censored += o.censored;
    length_sum += o.length_sum;
    length_sq_sum += o.length_sq_sum;
    for (std::size_t k = 0; k < phase_observed.size(); ++k) {
      phase_observed[k] += o.phase_observed[k];
      for (std::size_t j = 0; j < phase_counts[k].size(); ++j) {
        phase_counts[k][j] += o.phase_counts[k][j];
      }
    }
    for (std::size_t i = 0; i < transitions.size(); ++i) {
      for (std::size_t j = 0; j < transitions[i].size(); ++j) {
        transitions[i][j] += o.transitions[i][j];
      }
    }
  }
};

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ChainSampler::ChainSampler(const TransitionMatrix& m)
    : matrix_(m), rows_(m.size()), absorbing_(m.size()) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    absorbing_[i] = m(i, i) == 1;
    double cumulative = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m(i, j) == 0) continue;
      cumulative += to_double(m(i, j));
      rows_[i].push_back({cumulative, j});
    }
    // Rounding may leave the total a hair under 1; the last bucket takes it.
    rows_[i].back().upper = 2.0;
  }
}

SampledPath ChainSampler::sample(std::size_t start, std::uint64_t seed,
                                 std::uint64_t max_phases) const {
  std::mt19937_64 rng(seed);
  SampledPath path;
  path.states.push_back(start);
  std::size_t current = start;
  for (std::uint64_t step = 0; !absorbing_[current]; ++step) {
    if (step == max_phases) {
      path.censored = true;
      break;
    }
    const double u = uniform01(rng);
    const auto& row = rows_[current];
    const auto it = std::upper_bound(row.begin(), row.end(), u,
                                     [](double v, const Bucket& b) { return v < b.upper; });
    current = it->target;
    path.states.push_back(current);
  }
  return path;
}

SampledPath sample_trajectory(const TransitionMatrix& m, std::string_view start,
                              std::uint64_t seed, std::uint64_t max_phases) {
  const std::size_t s = require_state(m, start);
  return ChainSampler(m).sample(s, seed, max_phases);
}

std::vector<SampledPath> sample_paths(const TransitionMatrix& m, std::string_view start,
                                      const SimulationConfig& cfg) {
  const std::size_t s = require_state(m, start);
  const ChainSampler sampler(m);
  std::vector<SampledPath> out(cfg.num_trajectories);
  parallel_blocks(cfg.num_trajectories, worker_count(cfg),
                  [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
                    for (std::uint64_t i = lo; i < hi; ++i) {
                      out[i] = sampler.sample(s, trajectory_seed(cfg.seed, i), cfg.max_phases);
                    }
                  });
  return out;
}

Trajectory as_trajectory(const SampledPath& path, const TransitionMatrix& m) {
  if (m.states() != cbr_states()) {
    throw Error(ErrorCode::StateMismatch, "matrix is not over R1..R4");
  }
  std::vector<Step> steps;
  steps.reserve(path.length());
  for (std::size_t s : path.states) steps.push_back(static_cast<Step>(s));
  return validate_trajectory(std::span<const Step>(steps));
}

const std::vector<std::uint64_t>& SimulationReport::exit_counts(std::string_view state) const {
  const auto it = std::find(states.begin(), states.end(), state);
  if (it == states.end()) {
    throw Error(ErrorCode::UnknownStartState, "no state named '" + std::string(state) + "'");
  }
  return transition_counts[static_cast<std::size_t>(it - states.begin())];
}

SimulationReport run_simulation(const TransitionMatrix& m, std::string_view start,
                                const SimulationConfig& cfg,
                                std::span<const std::size_t> phases_of_interest) {
  const std::size_t s = require_state(m, start);
  if (cfg.num_trajectories == 0) {
    throw Error(ErrorCode::InvalidArgument, "num_trajectories must be at least 1");
  }
  if (cfg.max_phases == 0) {
    throw Error(ErrorCode::InvalidArgument, "max_phases must be at least 1");
  }
  const ChainSampler sampler(m);
  const unsigned workers = worker_count(cfg);
  std::vector<Tally> partial(workers, Tally(m.size(), phases_of_interest.size()));
  parallel_blocks(cfg.num_trajectories, workers,
                  [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
                    for (std::uint64_t i = lo; i < hi; ++i) {
                      partial[w].add(
                          sampler.sample(s, trajectory_seed(cfg.seed, i), cfg.max_phases),
                          phases_of_interest);
                    }
                  });
  Tally total(m.size(), phases_of_interest.size());
  for (const auto& p : partial) total.merge(p);

  SimulationReport r;
  r.states = m.states();
  r.start = std::string(start);
  r.seed = cfg.seed;
  r.num_trajectories = cfg.num_trajectories;
  r.max_phases = cfg.max_phases;
  r.absorbed_count = total.absorbed;
  r.censored_count = total.censored;
  if (total.absorbed > 0) {
    const Rational mean(BigInt(total.length_sum), BigInt(total.absorbed));
    r.empirical_mean_steps = to_double(mean);
  }
  if (total.absorbed > 1) {
    // Unbiased variance (n*S2 - S1^2) / (n(n-1)), kept exact until the end.
    const BigInt n(total.absorbed);
    const BigInt s1(total.length_sum);
    const BigInt s2(total.length_sq_sum);
    const Rational variance(n * s2 - s1 * s1, n * (n - 1));
    r.standard_error = std::sqrt(to_double(variance) / static_cast<double>(total.absorbed));
  }
  for (std::size_t k = 0; k < phases_of_interest.size(); ++k) {
    PhaseFrequencies pf;
    pf.phase = phases_of_interest[k];
    pf.observed = total.phase_observed[k];
    pf.counts = total.phase_counts[k];
    pf.frequencies.resize(pf.counts.size());
    if (pf.observed > 0) {
      for (std::size_t j = 0; j < pf.counts.size(); ++j) {
        pf.frequencies[j] =
            static_cast<double>(pf.counts[j]) / static_cast<double>(pf.observed);
      }
    }
    r.phase_distributions.push_back(std::move(pf));
  }
  r.transition_counts = std::move(total.transitions);
  return r;
}

R3ExitCounts exit_counts_from_r3(const SimulationReport& report) {
  if (report.states != cbr_states()) {
    throw Error(ErrorCode::StateMismatch, "report is not over R1..R4");
  }
  const auto& row = report.exit_counts("R3");
  return {row[0], row[2], row[3]};
}

std::string report_to_json(const SimulationReport& r) {
  using json = nlohmann::ordered_json;
  json out;
  out["states"] = r.states;
  out["start"] = r.start;
  out["seed"] = r.seed;
  out["num_trajectories"] = r.num_trajectories;
  out["max_phases"] = r.max_phases;
  out["absorbed_count"] = r.absorbed_count;
  out["censored_count"] = r.censored_count;
  out["empirical_mean_steps"] =
      r.empirical_mean_steps ? json(*r.empirical_mean_steps) : json(nullptr);
  out["standard_error"] = r.standard_error ? json(*r.standard_error) : json(nullptr);
  json phases = json::array();
  for (const auto& pf : r.phase_distributions) {
    phases.push_back({{"phase", pf.phase},
                      {"observed", pf.observed},
                      {"counts", pf.counts},
                      {"frequencies", pf.frequencies}});
  }
  out["phase_distributions"] = std::move(phases);
  out["transition_counts"] = r.transition_counts;
  return out.dump(2) + "\n";
}

}  // namespace cbrm
