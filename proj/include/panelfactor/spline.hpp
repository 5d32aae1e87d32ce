// SPDX-License-Identifier: MIT
/**
 * @file spline.hpp
 * @brief Natural cubic smoothing splines on the grid t = 1..T.
 *
 * The spline is represented in its cardinal (interpolation) basis: the basis
 * matrix Z is the identity and the roughness penalty R = Q Rm^{-1} Q' is the
 * classical banded construction for natural cubic splines. The smoother
 * Z_kappa = (I + kappa R)^{-1} is evaluated through a single symmetric
 * eigendecomposition of R (Demmler-Reinsch form), so every kappa costs O(T^2)
 * to materialise and O(T) for traces and GCV scores.
 */
#pragma once

#include "panelfactor/panel.hpp"

namespace pf {

/// Smoother matrix for one kappa.
struct Smoother {
  double kappa = 0.0;
  Matrix Z_kappa;
  double trace = 0.0;
};

/// Result of GCV smoothing-parameter selection.
struct GcvResult {
  double kappa = 0.0;
  double score = 0.0;
  bool degenerate = false;  ///< true when the residual panel is identically zero (kappa = +inf)
};

class SplineSystem {
 public:
  /// Builds basis and penalty for T >= 4 grid points.
  explicit SplineSystem(Index T);

  Index T() const { return T_; }
  /// Derivative order of the roughness penalty (fixed at 2: cubic splines).
  static constexpr int m = 2;
  /// Basis matrix (identity in the cardinal basis).
  Matrix basis() const { return Matrix::Identity(T_, T_); }
  /// Penalty matrix R (symmetric PSD, null space = span{1, t}).
  const Matrix& penalty() const { return R_; }
  /// Eigenvalues of R in ascending order (the first two are exactly zero).
  const Vector& penalty_eigenvalues() const { return s_; }
  const Matrix& penalty_eigenvectors() const { return U_; }

  /// Z_kappa = (I + kappa R)^{-1}; throws NegativeKappa for kappa < 0.
  Smoother smoother(double kappa) const;
  /// Smoother matrix only.
  Matrix smoother_matrix(double kappa) const;
  /// Eigenvalues 1 / (1 + kappa s_j) of Z_kappa (ascending s order).
  Vector smoother_eigenvalues(double kappa) const;
  /// tr(Z_kappa); equals T at kappa = 0 and tends to 2 as kappa -> infinity.
  double trace(double kappa) const;

  /**
   * GCV(kappa) = sum_i ||W_i - Z_kappa W_i||^2 / ((n/T) tr(I - Z_kappa)^2)
   * for a T x n residual panel W.
   */
  double gcv(double kappa, const Matrix& W) const;

  /// Minimises GCV over a 64-point log grid followed by golden-section refinement.
  GcvResult gcv_select(const Matrix& W) const;

  /// Log-spaced kappa grid used by gcv_select.
  Vector kappa_grid() const;

 private:
  double gcv_from_energy(double kappa, const Vector& energy, double n) const;

  Index T_;
  Matrix R_;
  Vector s_;
  Matrix U_;
};

}  // namespace pf
