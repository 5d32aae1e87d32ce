// SPDX-License-Identifier: MIT
/**
 * @file inference.hpp
 * @brief Slope covariance of the iterated factor estimator under eight error
 *        structures, Bartlett HAC weights, and the B/C bias correction.
 *
 * With M = I - F F'/T and a_ik = lambda_i' (Lambda'Lambda/n)^{-1} lambda_k the
 * projected regressors are Z_i = M X_i - (1/n) sum_k a_ik M X_k and
 * D0 = (1/nT) sum_i Z_i'Z_i. The covariance is D0^{-1} D_Z D0^{-1} / (nT):
 *
 *   case 1  i.i.d.                          D_Z = sigma^2 D0
 *   case 2  cross-section heteroskedastic   sigma_i^2 weights
 *   case 3  cross-section correlation       pairs among the first floor(sqrt n) units
 *   case 4  time heteroskedastic            sigma_t^2 weights
 *   case 5  time correlation                Bartlett-weighted rho(t,s)
 *   case 6  both heteroskedastic            eps_it^2 weights (White)
 *   case 7  as case 6, plus bias correction with diagonal Omega
 *   case 8  per-unit HAC, plus bias correction with Bartlett Omega
 */
#pragma once

#include "panelfactor/eup.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pf {

struct ErrorCase {
  int id = 1;                     ///< 1..8
  std::optional<int> bandwidth;   ///< HAC truncation L for cases 5 and 8 (default floor(min(sqrt n, sqrt T)))
};

/// Bartlett weights w_j = 1 - j/(L+1), j = 0..L.
Vector hac_weights(int L);
int default_bandwidth(Index T, Index n);

struct SlopeInference {
  int error_case = 1;
  Matrix D0;
  Matrix DZ;
  Matrix cov;       ///< D0^{-1} D_Z D0^{-1} / (nT)
  Vector se;
  double sig2 = 0.0;  ///< sigma^2 used by case 1
  std::optional<Vector> bias_B;
  std::optional<Vector> bias_C;
  std::optional<Vector> beta_star;  ///< beta - B/n - C/T
  std::vector<std::string> flags;
};

/// Z panels (one T x n panel per regressor) for given factors, loadings and regressors.
std::vector<Matrix> projected_regressors(const Matrix& F, const Matrix& Lambda, const std::vector<Matrix>& X);
std::vector<Matrix> projected_regressors(const EupFit& fit);

/// D0 = (1/nT) sum_{i,t} Z_it Z_it'.
Matrix d0_matrix(const std::vector<Matrix>& Z);

SlopeInference slope_covariance(const EupFit& fit, const ErrorCase& error_case = {});

/// Covariance plus bias terms for cases 7 and 8 (d >= 1).
SlopeInference bias_correct(const EupFit& fit, const ErrorCase& error_case);

/// Bias terms B and C for given factors, loadings, regressors and residuals.
void bias_terms(const Matrix& F, const Matrix& Lambda, const std::vector<Matrix>& X, const Matrix& residuals,
                int error_case, int bandwidth, Vector& B, Vector& C);

SummaryTable eup_summary(const EupFit& fit, const SlopeInference& inference);

}  // namespace pf
