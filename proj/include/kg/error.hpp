#pragma once

#include <stdexcept>
#include <string>

namespace kg {

enum class ErrorCode {
  NotPositiveDefinite,
  NotSymmetric,
  DimensionMismatch,
  ContractionNotLessThanOne,
  KappaOutOfRange,
  KappaMinusNotAboveMinusOne,
  EmptySpectrum,
  ZeroInSpectrum,
  NonRealSpectrum,
  AlphaOutOfRange,
  InvalidArgument,
  ParseError,
  ValidationError,
  SolverFailure,
};

/// Coarse grouping used for process exit codes.
enum class ErrorCategory { Usage, Parse, Validation, Solver };

const char* to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace kg
