#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sitnikov {

enum class ErrorCode {
  kInvalidArgument,
  kParseError,
  kInvalidTable,
  kEccentricityOutOfRange,
  kNotCertified,
  kOriginCrossing,
  kNotPeriodic,
  kCollisionDetected,
  kToleranceNotMet,
  kLambdaOutOfRange,
  kEnergyOutOfRange,
  kNoSeed,
  kAntiperiodicityUnattainable,
  kBracketFailure,
  kIntegratorFailure,
  kNonFiniteState,
  kResidualTooLarge,
  kDegenerateProfile,
  kCountMismatch,
  kSeedInvalid,
  kStepFailure,
  kIndexNotBracketed,
  kWeightNotPositive,
  kBoundViolated,
  kInvariantViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Errors caused by bad user input (malformed files, invalid parameters)
/// rather than by a numerical failure.
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace sitnikov
