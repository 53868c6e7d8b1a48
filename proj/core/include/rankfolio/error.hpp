#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rankfolio {

enum class ErrorCode {
  // scenario
  MissingPerformance,
  FeatureArityMismatch,
  DuplicateId,
  MalformedFile,
  NegativeRuntime,
  InvalidSpec,
  Io,
  // learners
  EmptyInput,
  ArityMismatch,
  SingularSystem,
  UnknownLearner,
  // rankers
  MalformedLabel,
  InvalidRankMultiset,
  NonFiniteScore,
  TooFewRows,
  ComboMismatch,
  UnknownStrategy,
  // evaluation
  TooFewInstances,
  LengthMismatch,
  IncompleteGrid,
  InvalidGroups,
  // portfolio-sim
  InvalidBudget,
  LevelMismatch,
  UnknownAlgorithm,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rankfolio
