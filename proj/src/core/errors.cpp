#include "errors.hpp"

namespace specforge {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ResponseEmpty: return "ResponseEmpty";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PrivacyViolation: return "PrivacyViolation";
    case ErrorCode::NoResults: return "NoResults";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::DraftFailure: return "DraftFailure";
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace specforge
