#pragma once

#include <stdexcept>
#include <string>

namespace sopinf {

enum class ErrorCode {
  NonFinite,
  SingularAssembly,
  SingularEffectiveMatrix,
  RankDeficient,
  DimensionMismatch,
  ZeroSnapshot,
  IllConditionedStiffness,
  RankDeficientRegressor,
  ZeroReference,
  InvalidArgument,
  ConfigError,
  MissingArtifact,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Config errors carry the dotted path of the offending field, e.g. "reduction.r".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace sopinf
