#pragma once

// Case libraries organised as generalized episodes (GEs), and the
// efficiency metrics computed over them.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "cbrm/cbr_model.hpp"
#include "cbrm/rational.hpp"

namespace cbrm {

/// A stored case and where its completion measure t_i comes from: a value
/// recorded directly, a single observed trajectory, or known parameters.
struct CaseRecord {
  std::string id;
  std::variant<Rational, Trajectory, CbrParameters> source;

  friend bool operator==(const CaseRecord&, const CaseRecord&) = default;
};

struct GeneralizedEpisode {
  std::string name;
  std::vector<CaseRecord> cases;
  std::vector<GeneralizedEpisode> sub_episodes;

  friend bool operator==(const GeneralizedEpisode&, const GeneralizedEpisode&) = default;
};

struct CaseLibrary {
  std::vector<GeneralizedEpisode> episodes;
  /// Non-fatal findings from a lenient load (e.g. direct t below 3).
  std::vector<std::string> warnings;

  /// Number of distinct case ids across the whole library.
  std::size_t n() const;

  friend bool operator==(const CaseLibrary& a, const CaseLibrary& b) {
    return a.episodes == b.episodes;
  }
};

/// Direct: the stored value. Parameters: mean_phases. Trajectory: MLE on
/// that single trajectory, then mean_phases.
/// Throws NonAbsorbing or NotAbsorbed.
Rational case_measure(const CaseRecord& c);

/// Own cases then sub-episodes depth first; an id already collected is
/// skipped.
std::vector<const CaseRecord*> distinct_cases(const GeneralizedEpisode& g);
std::vector<const CaseRecord*> distinct_cases(const CaseLibrary& lib);

/// Mean case measure over the GE and all its descendants. Throws EmptyEpisode.
Rational episode_efficiency(const GeneralizedEpisode& g);

/// Unweighted mean of top-level episode efficiencies. Throws EmptyLibrary or
/// EmptyEpisode.
Rational system_efficiency(const CaseLibrary& lib);

/// Mean case measure over every distinct case, ignoring structure.
/// Throws EmptyLibrary.
Rational flat_efficiency(const CaseLibrary& lib);

/// flat efficiency after each case in distinct_cases order is added.
std::vector<Rational> flat_efficiency_trend(const CaseLibrary& lib);

struct LoadOptions {
  /// Accept direct measures below 3 with a warning instead of failing.
  bool allow_low_t = false;
};

/// JSON document:
///   {"episodes": [{"name": "...", "cases": [...], "sub_episodes": [...]}]}
/// where each case is {"id": "..."} plus exactly one of
///   "t": "8/3" | 3,   "trajectory": ["R1", ...],
///   "params": {"p31": "1/4", "p33": "1/2", "p34": "1/4"}.
/// Throws ParseError, SchemaError, DuplicateCaseId or InvalidTrajectory.
CaseLibrary parse_library(std::istream& in, const LoadOptions& options = {});
CaseLibrary parse_library_text(const std::string& text, const LoadOptions& options = {});
CaseLibrary load_library(const std::filesystem::path& path, const LoadOptions& options = {});

/// Inverse of parse_library; rationals are written as fraction strings.
std::string serialize_library(const CaseLibrary& lib);

}  // namespace cbrm
