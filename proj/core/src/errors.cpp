#include "cbrm/errors.hpp"

namespace cbrm {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::RowSumNotOne: return "RowSumNotOne";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::StateMismatch: return "StateMismatch";
    case ErrorCode::NotAbsorbingChain: return "NotAbsorbingChain";
    case ErrorCode::NoTransientStates: return "NoTransientStates";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::NonAbsorbing: return "NonAbsorbing";
    case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::DoesNotStartAtR1: return "DoesNotStartAtR1";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::NotAbsorbed: return "NotAbsorbed";
    case ErrorCode::NoR3Observations: return "NoR3Observations";
    case ErrorCode::EmptyEpisode: return "EmptyEpisode";
    case ErrorCode::EmptyLibrary: return "EmptyLibrary";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DuplicateCaseId: return "DuplicateCaseId";
    case ErrorCode::InvalidTrajectory: return "InvalidTrajectory";
    case ErrorCode::UnknownStartState: return "UnknownStartState";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail) {
  std::string msg(error_name(code));
  if (!detail.empty()) {
    msg += ": ";
    msg += detail;
  }
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(compose(code, detail)), code_(code), detail_(detail) {}

RowSumError::RowSumError(std::size_t row, std::string actual_sum)
    : Error(ErrorCode::RowSumNotOne,
            "row " + std::to_string(row) + " sums to " + actual_sum),
      row_(row),
      sum_(std::move(actual_sum)) {}

IllegalTransitionError::IllegalTransitionError(std::size_t index,
                                               std::string from,
                                               std::string to)
    : Error(ErrorCode::IllegalTransition,
            "no edge " + from + " -> " + to + " at index " +
                std::to_string(index)),
      index_(index),
      from_(std::move(from)),
      to_(std::move(to)) {}

ParseError::ParseError(std::string location, const std::string& detail)
    : Error(ErrorCode::ParseError, location + ": " + detail),
      location_(std::move(location)) {}

}  // namespace cbrm
