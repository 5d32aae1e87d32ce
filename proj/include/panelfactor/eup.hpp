// SPDX-License-Identifier: MIT
/**
 * @file eup.hpp
 * @brief Iterated least squares with a factor structure and a jointly
 *        estimated, penalised factor dimension.
 *
 * For a fixed dimension d the estimator alternates principal components of
 * Y - X beta with pooled least squares of Y - F Lambda' on X. The outer loop
 * re-selects d by minimising a penalised criterion whose sigma^2 is the
 * current iterate's residual variance.
 */
#pragma once

#include "panelfactor/design.hpp"
#include "panelfactor/dimsel.hpp"
#include "panelfactor/factors.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pf {

struct EupOptions {
  Effects effects = Effects::None;
  Criterion dim_criterion = Criterion::PC1;
  std::optional<int> d_max;
  std::optional<int> factor_dim;  ///< fixes d and skips the dimension update
  bool double_iteration = true;
  std::optional<Vector> start_beta;
  int max_iteration = 500;
  double convergence = 1e-6;
  Restriction restriction = Restriction::RestrictFactors;
};

struct EupFit {
  Vector beta;                              ///< slopes (length P)
  std::vector<std::string> regressor_names;
  bool has_intercept = false;
  double intercept = 0.0;                   ///< mu when estimated
  AdditiveEffects additive;
  FactorStructure factors;
  Matrix residuals;                         ///< idiosyncratic residuals W - F Lambda'
  Matrix W;                                 ///< transformed Y - X beta
  int d_used = 0;
  int d_max = 0;
  std::string dim_criterion;
  int iterations = 0;                       ///< total least-squares sweeps
  bool converged = true;
  std::vector<std::string> flags;
  double ssr = 0.0;
  double sig2 = 0.0;                        ///< SSR / (nT)
  int df = 0;                               ///< nT - (n+T)d - P - additive parameters
  double residual_scale = 0.0;              ///< sqrt(SSR / df)
  double r_squared = 0.0;                   ///< 1 - SSR / centred SST of the transformed response
  std::vector<double> objective_history;    ///< SSR after every sweep
  std::vector<int> dimension_history;       ///< d at every outer step
  Design design;                            ///< transformed data used for the fit
};

/**
 * Starting values from the augmented covariance of (Y, X): beta from least
 * squares after projecting out its d_max leading eigenvectors, each
 * down-weighted by (1 - R^2) against the cross-section-mean regressors.
 */
Vector eup_start_beta(const Matrix& Y, const std::vector<Matrix>& X, int d_max);
Vector eup_start_beta(const PanelSet& data, int d_max);

EupFit eup_fit(const PanelSet& data, const EupOptions& options = {});

}  // namespace pf
