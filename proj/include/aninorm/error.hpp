#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aninorm {

/// Failure categories raised by the library. The CLI reports them verbatim
/// through to_string() in its machine-readable error object.
enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  InvalidTimeScale,
  SpectralRadius,    // closed loop not Schur stable
  SpectralAbscissa,  // matrix not Hurwitz in a Lyapunov solve
  NotHurwitz,
  NotSchur,
  SingularShift,
  ResolventSingular,
  PoleAtMinusOne,
  NotStrictlyProper,
  TooLarge,
  Bracket,
  MaxIter,
  InadmissibleQ,
  NonroundRequired,
  ZeroDenominator,
  UnstableSystem,
  StepTooLarge,
  Inconsistent,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aninorm
