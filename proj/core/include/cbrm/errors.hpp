#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cbrm {

enum class ErrorCode {
  // markov_core
  DimensionMismatch,
  NegativeEntry,
  RowSumNotOne,
  DuplicateLabel,
  InvalidDistribution,
  StateMismatch,
  NotAbsorbingChain,
  NoTransientStates,
  SingularMatrix,
  // cbr_model
  InvalidParameters,
  NonAbsorbing,
  EmptyTrajectory,
  DoesNotStartAtR1,
  IllegalTransition,
  UnknownLabel,
  NotAbsorbed,
  NoR3Observations,
  // case_library
  EmptyEpisode,
  EmptyLibrary,
  ParseError,
  SchemaError,
  DuplicateCaseId,
  InvalidTrajectory,
  // simulate
  UnknownStartState,
  InvalidArgument,
};

/// Stable identifier for an error code, e.g. "NonAbsorbing".
std::string_view error_name(ErrorCode code) noexcept;

/// Base of every domain error raised by the library. what() is prefixed with
/// the error name so command-line callers can surface it verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

class RowSumError : public Error {
 public:
  RowSumError(std::size_t row, std::string actual_sum);

  std::size_t row() const noexcept { return row_; }
  /// Exact sum of the offending row, rendered as a fraction.
  const std::string& actual_sum() const noexcept { return sum_; }

 private:
  std::size_t row_;
  std::string sum_;
};

class IllegalTransitionError : public Error {
 public:
  IllegalTransitionError(std::size_t index, std::string from, std::string to);

  /// Position of the element that cannot follow its predecessor.
  std::size_t index() const noexcept { return index_; }
  const std::string& from() const noexcept { return from_; }
  const std::string& to() const noexcept { return to_; }

 private:
  std::size_t index_;
  std::string from_;
  std::string to_;
};

class ParseError : public Error {
 public:
  ParseError(std::string location, const std::string& detail);

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

}  // namespace cbrm
