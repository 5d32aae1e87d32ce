// SPDX-License-Identifier: MIT
/**
 * @file kss.hpp
 * @brief Semiparametric panel regression with smooth time-varying individual
 *        effects: spline smoothing of the residual curves, functional
 *        principal components of the smoothed curves, and a sequential test
 *        for the number of common factors.
 *
 * Model: Y_i = mu + X_i beta + v_i + e_i with v_i smooth in t. For a given
 * smoothing parameter kappa the slopes solve
 *   beta(kappa) = (sum_i X_i'(I - Z_kappa) X_i)^{-1} sum_i X_i'(I - Z_kappa) Y_i,
 * and kappa is re-selected by GCV on Y - X beta until both stabilise.
 */
#pragma once

#include "panelfactor/design.hpp"
#include "panelfactor/dimsel.hpp"
#include "panelfactor/factors.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pf {

struct KssOptions {
  Effects effects = Effects::None;
  std::optional<int> factor_dim;  ///< skips the KSS.C dimension test
  double level = 0.01;            ///< level of the sequential dimension test
  std::optional<double> spar;     ///< fixes kappa (no GCV iteration)
  bool cv = false;                ///< leave-one-unit-out refinement of kappa below the GCV value
  double convergence = 1e-6;
  int max_iteration = 500;
  bool consult_dim = false;       ///< attach the full criterion table; requires factor_dim
  Restriction restriction = Restriction::RestrictFactors;
};

struct KssFit {
  Vector beta;                              ///< slopes (length P)
  Matrix beta_cov;                          ///< P x P slope covariance
  std::vector<std::string> regressor_names;
  bool has_intercept = false;
  double intercept = 0.0;
  double intercept_se = 0.0;
  double kappa = 0.0;
  double kappa_gcv = 0.0;                   ///< GCV value before any CV refinement
  FactorStructure factors;
  Matrix v_hat;                             ///< F Lambda' (T x n)
  AdditiveEffects additive;
  Matrix residuals;                         ///< Y - X beta - additive - v_hat
  Matrix W;                                 ///< transformed Y - X beta
  double ssr = 0.0;
  int df = 0;                               ///< nT - (n+T)d - P - additive parameters
  double sig2 = 0.0;                        ///< SSR / df
  double r_squared = 0.0;
  int d_used = 0;
  std::string used_dim_criterion;           ///< "KSS.C" or "fixed"
  std::vector<double> dim_statistics;       ///< KSS(0), KSS(1), ... when KSS.C was used
  int iterations = 0;
  bool converged = true;
  std::vector<std::string> flags;
  std::optional<DimReport> consult;         ///< criterion table on W when consult_dim is set
  std::vector<std::pair<double, double>> cv_scores;  ///< (kappa, CV) pairs when cv is set
  Design design;
};

KssFit kss_fit(const PanelSet& data, const KssOptions& options = {});

/**
 * Converged slopes, kappa and the full criterion table on W = Y - X beta.
 * This is what `consult_dim` shows before a dimension is chosen.
 */
DimReport kss_consult(const PanelSet& data, const KssOptions& options = {});

/// Closed-form slopes at a fixed kappa on transformed data.
Vector kss_beta(const Design& design, double kappa);

/**
 * Penalised objective sum_i ||Y_i - X_i beta - zeta_i||^2 + kappa sum_i zeta_i' R zeta_i
 * after each sweep of the alternation (zeta | beta) -> (beta | zeta) at fixed kappa.
 */
std::vector<double> kss_cascade_objective(const Design& design, double kappa, Vector beta, int sweeps);

SummaryTable kss_summary(const KssFit& fit);

}  // namespace pf
