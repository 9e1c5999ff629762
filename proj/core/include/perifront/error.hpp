#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace perifront {

/// Failure categories raised by the numerical modules. The CLI reports
/// `to_string(code)` verbatim, so the names are part of the output format.
enum class ErrorCode {
  InvalidInput,
  GridMismatch,
  NonKPP,
  NoConvergence,
  NotKPPUnstable,
  BracketFailure,
  SubcriticalSpeed,
  NoPositiveState,
  SigmaOutOfRange,
  MonotonicityLost,
  StageRegression,
  InsufficientTail,
  StabilityViolation,
  DomainTooSmall,
  LevelNotReached,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidInput, what);
}

}  // namespace perifront
