#include "sopinf/error.hpp"

namespace sopinf {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SingularAssembly: return "SingularAssembly";
    case ErrorCode::SingularEffectiveMatrix: return "SingularEffectiveMatrix";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroSnapshot: return "ZeroSnapshot";
    case ErrorCode::IllConditionedStiffness: return "IllConditionedStiffness";
    case ErrorCode::RankDeficientRegressor: return "RankDeficientRegressor";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ConfigError::ConfigError(std::string field, const std::string& message)
    : Error(ErrorCode::ConfigError, field + ": " + message), field_(std::move(field)) {}

}  // namespace sopinf
