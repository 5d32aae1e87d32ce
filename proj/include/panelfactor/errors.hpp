// SPDX-License-Identifier: MIT
/**
 * @file errors.hpp
 * @brief Error taxonomy shared by all modules.
 *
 * Every failure is reported as a pf::Error carrying a stable code (used in
 * diagnostics and by the Python bindings) and a category. The CLI maps the
 * category to its exit status: data errors -> 3, model errors -> 2.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace pf {

enum class ErrorCategory { Data, Model };

enum class ErrorCode {
  // data / ingestion
  MissingCell,
  DuplicateCell,
  NonNumericValue,
  DomainError,
  ShapeMismatch,
  DivisionByZero,
  TooShort,
  NonFinite,
  Io,
  // model / numerics
  InvalidArgument,
  NegativeKappa,
  DegenerateInput,
  DimensionTooLarge,
  EmptyStructure,
  GridTooCoarse,
  NoConvergence,
  SingularDesign,
  OscillatingDimension,
  SingularLoadingGram,
  SingularD0,
  NegativeStatistic,
  MismatchedFits,
  DegenerateVariance,
};

/// Stable textual name of an error code (e.g. "MissingCell").
const char* error_code_name(ErrorCode code) noexcept;

/// Category used for exit-status mapping.
ErrorCategory error_category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return error_category(code_); }

 private:
  ErrorCode code_;
};

}  // namespace pf
