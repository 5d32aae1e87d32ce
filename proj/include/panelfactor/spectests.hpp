// SPDX-License-Identifier: MIT
/**
 * @file spectests.hpp
 * @brief Specification tests: a Hausman-type comparison of the factor model
 *        against classical additive effects, and a test for the existence of
 *        any factor structure beyond additive effects.
 */
#pragma once

#include "panelfactor/eup.hpp"

#include <optional>
#include <string>

namespace pf {

enum class Decision { Reject, FailToReject };
std::string to_string(Decision d);

struct TestResult {
  std::string test_name;
  double statistic = 0.0;
  double p_value = 1.0;
  double critical_value = 0.0;
  double level = 0.01;
  Decision decision = Decision::FailToReject;
  std::string distribution;  ///< "chisq(P)" or "normal"
};

/**
 * Hausman-type test. `restricted` is an additive-effects fit without factors,
 * `unrestricted` a factor fit (effects none, a generous d). Throws
 * NegativeStatistic when the covariance difference is not positive definite
 * or the statistic is negative, MismatchedFits when the fits do not share data.
 *
 *   J = nT (b_u - b_r)' Delta^{-1} (b_u - b_r),
 *   Delta = (D0^{-1} - (sum X'X / nT)^{-1}) sigma^2,
 *   sigma^2 = SSR_u / (nT - (n+T)d - P + 1),   J ~ chisq(P).
 */
TestResult hausman_test(const EupFit& restricted, const EupFit& unrestricted, double level = 0.01);

/**
 * Test of H0: no factor structure beyond the additive effects.
 * Residuals W of the pooled within regression give
 *   J = (||W||^2 - (n-1)(T-1) sigma^2) / (sqrt(2n) (T-1) sigma^2),
 * sigma^2 = (sum of eigenvalues of W W' beyond d_max) / (nT - (n+T)d_max - P + 1).
 * One-sided: reject when J > z_{1-level}.
 */
TestResult factor_existence_test(const PanelSet& data, Effects effects = Effects::Twoways, double level = 0.01,
                                 std::optional<int> d_max = std::nullopt);

}  // namespace pf
