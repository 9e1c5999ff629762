#include "perifront/error.hpp"

namespace perifront {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonKPP: return "NonKPP";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotKPPUnstable: return "NotKPPUnstable";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::SubcriticalSpeed: return "SubcriticalSpeed";
    case ErrorCode::NoPositiveState: return "NoPositiveState";
    case ErrorCode::SigmaOutOfRange: return "SigmaOutOfRange";
    case ErrorCode::MonotonicityLost: return "MonotonicityLost";
    case ErrorCode::StageRegression: return "StageRegression";
    case ErrorCode::InsufficientTail: return "InsufficientTail";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::LevelNotReached: return "LevelNotReached";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace perifront
