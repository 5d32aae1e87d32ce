// SPDX-License-Identifier: MIT
/**
 * @file factors.hpp
 * @brief Principal-component factor extraction with explicit normalisation.
 *
 * Factors are sqrt(T) times the leading eigenvectors of a T x T covariance of
 * a residual panel, loadings are the least-squares projections W'F/T. Sign
 * and ordering conventions make every extraction deterministic.
 */
#pragma once

#include "panelfactor/panel.hpp"

namespace pf {

/// Covariance scaling: (1/n) W W' (smoothing-based estimator) or (1/(nT)) W W'.
enum class Scaling { Kss, Eup };

/// Which side carries the identity normalisation.
enum class Restriction { RestrictFactors, RestrictLoadings };

std::string to_string(Restriction r);
Restriction parse_restriction(const std::string& name);

/// Descending eigen-decomposition of a symmetric covariance.
struct EigenDecomposition {
  Vector values;   ///< descending, clipped to >= 0
  Matrix vectors;  ///< columns matched to values, sign-normalised
};

/// Symmetric eigendecomposition of S with descending order, clipping and sign convention.
EigenDecomposition symmetric_eigen(const Matrix& S);

/**
 * Eigen-decomposition of the covariance of W (T x n).
 * @param standardize rescale W to unit overall sample variance first.
 */
EigenDecomposition covariance_eigen(const Matrix& W, bool standardize, Scaling scaling);

/// Rescales a panel to unit overall sample variance (no re-centering).
Matrix standardize_panel(const Matrix& W);

struct FactorStructure {
  Matrix F;              ///< T x d
  Matrix Lambda;         ///< n x d
  Vector eigenvalues;    ///< full descending spectrum of the covariance used
  int d = 0;
  Restriction restriction = Restriction::RestrictFactors;

  /// Common component F Lambda' (T x n).
  Matrix common() const;
};

/// Extracts d factors from W using the given covariance scaling and restriction.
FactorStructure extract_factors(const Matrix& W, int d, Scaling scaling,
                                Restriction restriction = Restriction::RestrictFactors);

/// Extracts d factors from W given an already computed decomposition of its covariance.
FactorStructure factors_from_eigen(const Matrix& W, const EigenDecomposition& eig, int d,
                                   Restriction restriction = Restriction::RestrictFactors);

/// Re-balances a structure to another restriction; F Lambda' is unchanged.
FactorStructure with_restriction(const FactorStructure& fs, Restriction restriction);

/// Shares V(lambda_l) / sum_k V(lambda_k) of the loading variances (sample variance across units).
Vector variance_shares(const FactorStructure& fs);

}  // namespace pf
