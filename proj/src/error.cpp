#include "sitnikov/error.hpp"

namespace sitnikov {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidTable: return "InvalidTable";
    case ErrorCode::kEccentricityOutOfRange: return "EccentricityOutOfRange";
    case ErrorCode::kNotCertified: return "NotCertified";
    case ErrorCode::kOriginCrossing: return "OriginCrossing";
    case ErrorCode::kNotPeriodic: return "NotPeriodic";
    case ErrorCode::kCollisionDetected: return "CollisionDetected";
    case ErrorCode::kToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::kLambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::kEnergyOutOfRange: return "EnergyOutOfRange";
    case ErrorCode::kNoSeed: return "NoSeed";
    case ErrorCode::kAntiperiodicityUnattainable: return "AntiperiodicityUnattainable";
    case ErrorCode::kBracketFailure: return "BracketFailure";
    case ErrorCode::kIntegratorFailure: return "IntegratorFailure";
    case ErrorCode::kNonFiniteState: return "NonFiniteState";
    case ErrorCode::kResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::kDegenerateProfile: return "DegenerateProfile";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kSeedInvalid: return "SeedInvalid";
    case ErrorCode::kStepFailure: return "StepFailure";
    case ErrorCode::kIndexNotBracketed: return "IndexNotBracketed";
    case ErrorCode::kWeightNotPositive: return "WeightNotPositive";
    case ErrorCode::kBoundViolated: return "BoundViolated";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
    case ErrorCode::kInvalidTable:
    case ErrorCode::kEccentricityOutOfRange:
    case ErrorCode::kLambdaOutOfRange:
    case ErrorCode::kEnergyOutOfRange:
      return true;
    default:
      return false;
  }
}

}  // namespace sitnikov
