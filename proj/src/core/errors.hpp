#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specforge {

enum class ErrorCode {
  InvalidInput,
  BackendUnavailable,
  ResponseEmpty,
  DimensionMismatch,
  PrivacyViolation,
  NoResults,
  ParseFailure,
  DraftFailure,
  MissingSection,
  ZeroVector,
  EmptyGroup,
  NoOverlap,
  DegenerateInput,
  Io,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the core carries one of the codes above; the C API
// maps them one-to-one onto sf_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace specforge
