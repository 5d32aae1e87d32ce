// SPDX-License-Identifier: MIT
/**
 * @file stats.hpp
 * @brief Thin wrappers around Boost.Math reference distributions.
 */
#pragma once

namespace pf::stats {

/// Standard normal quantile z_p.
double normal_quantile(double p);
/// Standard normal upper tail P(Z > z).
double normal_upper_tail(double z);
/// Two-sided normal p-value 2 P(Z > |z|).
double normal_two_sided_p(double z);
/// Chi-square upper tail P(X > x) with k degrees of freedom.
double chi2_upper_tail(double x, double k);
/// Chi-square quantile.
double chi2_quantile(double p, double k);

}  // namespace pf::stats
