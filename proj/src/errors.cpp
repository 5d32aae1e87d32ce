// SPDX-License-Identifier: MIT
#include "panelfactor/errors.hpp"

namespace pf {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeKappa: return "NegativeKappa";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::EmptyStructure: return "EmptyStructure";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::OscillatingDimension: return "OscillatingDimension";
    case ErrorCode::SingularLoadingGram: return "SingularLoadingGram";
    case ErrorCode::SingularD0: return "SingularD0";
    case ErrorCode::NegativeStatistic: return "NegativeStatistic";
    case ErrorCode::MismatchedFits: return "MismatchedFits";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingCell:
    case ErrorCode::DuplicateCell:
    case ErrorCode::NonNumericValue:
    case ErrorCode::DomainError:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::DivisionByZero:
    case ErrorCode::TooShort:
    case ErrorCode::NonFinite:
    case ErrorCode::Io:
      return ErrorCategory::Data;
    default:
      return ErrorCategory::Model;
  }
}

}  // namespace pf
