#include "ifsm/error.hpp"

namespace ifsm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyParameterSet: return "EmptyParameterSet";
    case ErrorCode::InvalidParameterSet: return "InvalidParameterSet";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::MapEscapesDomain: return "MapEscapesDomain";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateOperator: return "DegenerateOperator";
    case ErrorCode::NonPositiveEigenfunction: return "NonPositiveEigenfunction";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::EmptyOrbit: return "EmptyOrbit";
    case ErrorCode::AbsoluteContinuityViolated: return "AbsoluteContinuityViolated";
    case ErrorCode::OptimizerDiverged: return "OptimizerDiverged";
    case ErrorCode::NonPositiveFunction: return "NonPositiveFunction";
    case ErrorCode::LevelTooFine: return "LevelTooFine";
    case ErrorCode::NotDyadicFamily: return "NotDyadicFamily";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::ZeroPreviousValue: return "ZeroPreviousValue";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ErrorClass classify(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::Overflow:
    case ErrorCode::DegenerateOperator:
    case ErrorCode::NonPositiveEigenfunction:
    case ErrorCode::OptimizerDiverged:
      return ErrorClass::Numeric;
    case ErrorCode::IoError:
      return ErrorClass::Io;
    case ErrorCode::InvalidArgument:
      return ErrorClass::Usage;
    default:
      return ErrorClass::Validation;
  }
}

}  // namespace ifsm
