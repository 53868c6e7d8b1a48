#include "rankfolio/error.hpp"

namespace rankfolio {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingPerformance: return "MissingPerformance";
    case ErrorCode::FeatureArityMismatch: return "FeatureArityMismatch";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::NegativeRuntime: return "NegativeRuntime";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::UnknownLearner: return "UnknownLearner";
    case ErrorCode::MalformedLabel: return "MalformedLabel";
    case ErrorCode::InvalidRankMultiset: return "InvalidRankMultiset";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::ComboMismatch: return "ComboMismatch";
    case ErrorCode::UnknownStrategy: return "UnknownStrategy";
    case ErrorCode::TooFewInstances: return "TooFewInstances";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IncompleteGrid: return "IncompleteGrid";
    case ErrorCode::InvalidGroups: return "InvalidGroups";
    case ErrorCode::InvalidBudget: return "InvalidBudget";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::UnknownAlgorithm: return "UnknownAlgorithm";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace rankfolio
