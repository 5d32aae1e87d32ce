// SPDX-License-Identifier: MIT
/**
 * @file design.hpp
 * @brief Regression design shared by the estimators: transformed response and
 *        regressors, plus the helpers for pooled panel least squares.
 */
#pragma once

#include "panelfactor/panel.hpp"

#include <string>
#include <vector>

namespace pf {

struct Design {
  Matrix Y;                  ///< transformed response (T x n)
  std::vector<Matrix> X;     ///< transformed regressors (T x n each)
  Matrix Y_raw;              ///< untransformed response
  std::vector<Matrix> X_raw; ///< untransformed regressors
  std::vector<std::string> names;
  Effects effects = Effects::None;
  bool intercept = false;    ///< mu estimated (forced for twoways)
  double ybar = 0.0;         ///< grand mean of the raw response
  Vector xbar;               ///< grand means of the raw regressors
  int additive_dof = 0;      ///< number of free additive-effect parameters

  Index T() const { return Y.rows(); }
  Index n() const { return Y.cols(); }
  Index P() const { return static_cast<Index>(X.size()); }
};

/**
 * Applies the within transformation for `effects`; with effects = none and an
 * intercept the panels are centred by their grand means instead.
 */
Design prepare_design(const PanelSet& data, Effects effects);

/// P x P matrix of sum_{i,t} x_p x_q.
Matrix pooled_gram(const std::vector<Matrix>& X);
/// P x P matrix of sum_i X_p,i' A X_q,i for a T x T weight A.
Matrix weighted_gram(const std::vector<Matrix>& X, const Matrix& A);
/// Vector of sum_{i,t} x_p y.
Vector pooled_cross(const std::vector<Matrix>& X, const Matrix& Y);
/// Vector of sum_i X_p,i' A Y_i.
Vector weighted_cross(const std::vector<Matrix>& X, const Matrix& A, const Matrix& Y);
/// Y - sum_p beta_p X_p.
Matrix residual_panel(const Matrix& Y, const std::vector<Matrix>& X, const Vector& beta);
/// Solves a small symmetric positive definite system; throws SingularDesign if it is not.
Vector solve_spd(const Matrix& A, const Vector& b, const char* what);
/// Inverse of a small SPD matrix (SingularDesign on failure).
Matrix inverse_spd(const Matrix& A, const char* what);

/// One row of a coefficient table: estimate, standard error, z and two-sided normal p-value.
struct CoefficientRow {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p = 0.0;
};

struct SummaryTable {
  std::vector<CoefficientRow> coefficients;
  Vector residual_quantiles;  ///< min, 25%, median, 75%, max (type-7 quantiles)
  double r_squared = 0.0;
};

/// Builds coefficient rows from estimates and standard errors.
std::vector<CoefficientRow> coefficient_rows(const std::vector<std::string>& names, const Vector& estimate,
                                             const Vector& se);
/// Five-number summary of all entries of a residual panel.
Vector residual_quantiles(const Matrix& residuals);

}  // namespace pf
