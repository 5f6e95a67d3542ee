#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ifsm {

enum class ErrorCode {
  // model / validation
  EmptyParameterSet,
  InvalidParameterSet,
  InvalidDomain,
  NonPositiveDensity,
  MapEscapesDomain,
  OutOfDomain,
  UnknownParameter,
  ValidationError,
  // discretization and numerics
  GridMismatch,
  Overflow,
  NoConvergence,
  DegenerateOperator,
  NonPositiveEigenfunction,
  NotNormalized,
  EmptyOrbit,
  AbsoluteContinuityViolated,
  OptimizerDiverged,
  NonPositiveFunction,
  LevelTooFine,
  NotDyadicFamily,
  // boundary
  SyntaxError,
  UnknownIdentifier,
  DomainError,
  SchemaError,
  NonNumericCell,
  TooShort,
  ZeroPreviousValue,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Coarse classification used for process exit codes.
enum class ErrorClass { Validation, Numeric, Io, Usage };

ErrorClass classify(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when an iterative solver stops before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::string stage, double last_residual, int iterations)
      : Error(ErrorCode::NoConvergence,
              stage + " did not converge after " + std::to_string(iterations) +
                  " iterations (last residual " + std::to_string(last_residual) + ")"),
        stage_(std::move(stage)),
        residual_(last_residual),
        iterations_(iterations) {}

  const std::string& stage() const noexcept { return stage_; }
  double last_residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  std::string stage_;
  double residual_;
  int iterations_;
};

}  // namespace ifsm
