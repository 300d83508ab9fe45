#pragma once

#include <stdexcept>
#include <string>

namespace aircomp {

// Numeric values are shared with the C API (aircomp.h); keep them in sync.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = -1,
  kParse = -2,
  kValidation = -3,
  kSchedulingInPast = -4,
  kOutOfBounds = -5,
  kServerDown = -6,
  kInvalidTransition = -7,
  kInvalidAction = -8,
  kMissingColumn = -9,
  kIo = -10,
  kVerifyMismatch = -11,
  kInternal = -100,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Scenario validation failure. `field()` is a dotted path such as
/// `servers.edges[2].x`.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& constraint)
      : Error(ErrorCode::kValidation, field + ": " + constraint), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace aircomp
