// SPDX-License-Identifier: MIT
/**
 * @file dimsel.hpp
 * @brief Sixteen factor-dimension selection criteria over a shared spectrum.
 *
 * Conventions (see README "Dimension criteria"):
 *  - Penalised criteria (PC, BIC3, IC, IPC, ABC) and KSS.C use the panel as
 *    given; SSR(l)/(nT) is the eigenvalue tail sum of W W'/(nT).
 *  - Ratio and threshold criteria (ER, GR, ED) use the eigenvalues of the
 *    grand-mean-centred panel.
 *  - Ties resolve to the smallest dimension.
 */
#pragma once

#include "panelfactor/panel.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pf {

enum class Criterion { PC1, PC2, PC3, BIC3, IC1, IC2, IC3, IPC1, IPC2, IPC3, ABC_IC1, ABC_IC2, KSS_C, ED, ER, GR };

/// All sixteen criteria in report order.
const std::vector<Criterion>& all_criteria();
std::string criterion_name(Criterion c);
Criterion parse_criterion(const std::string& name);
/// True for criteria usable in the penalised Eup dimension update (PC, BIC3, IC, IPC families).
bool is_penalized(Criterion c);

/// floor(min(sqrt(n), sqrt(T))).
int default_d_max(Index T, Index n);

/// Descending eigenvalues of W W'/(nT).
Vector eup_eigenvalues(const Matrix& W);
/// Tail sums V(l) = sum_{r>l} rho_r for l = 0..d_max.
Vector tail_sums(const Vector& eigenvalues, int d_max);

/// Penalty g_nT(l) without the sigma^2 factor (IPC includes alpha_T = T/(4 log log T)).
double criterion_penalty(Criterion c, double n, double T, int l);
/// Criterion value at dimension l given V(l) and sigma^2 (ignored for IC).
double criterion_value(Criterion c, double V_l, int l, double n, double T, double sig2);
/// argmin over l in {0..d_max} of a penalised criterion (smallest l on ties).
int select_penalized(Criterion c, const Vector& V, double n, double T, double sig2, int d_max);

using DimMap = std::vector<std::pair<std::string, int>>;

/// PC1, PC2, PC3, BIC3; sigma^2 defaults to V(d_max).
DimMap pc_bic_criteria(const Matrix& W, int d_max, std::optional<double> sig2 = std::nullopt);
/// IC1, IC2, IC3.
DimMap ic_criteria(const Matrix& W, int d_max);
/// IPC1, IPC2, IPC3; sigma^2 defaults to V(d_max).
DimMap ipc_criteria(const Matrix& W, int d_max, std::optional<double> sig2 = std::nullopt);

struct AbcResult {
  int ic1 = 0;
  int ic2 = 0;
  bool fallback_ic1 = false;  ///< no second stability interval: plain IC1 used
  bool fallback_ic2 = false;
};

/**
 * Calibrated IC1/IC2: penalties scaled by c over c_grid and evaluated on the
 * subpanels (first T_seq[j] rows, first n_seq[j] columns). The dimension is
 * read from the second stability interval of c -> d-hat (the first is the
 * degenerate c ~ 0 run). Empty sequences select the defaults T-C..T, n-C..n
 * with C = floor(min(sqrt n, sqrt T, 30)).
 */
AbcResult abc_criteria(const Matrix& W, int d_max, const Vector& c_grid, std::vector<int> T_seq = {},
                       std::vector<int> n_seq = {});
/// Default calibration grid: 128 points equally spaced in [0, 5].
Vector default_c_grid();

struct ErGrResult {
  int er = 1;
  int gr = 1;
};
/// ER = argmax rho_l/rho_{l+1}, GR = argmax of the growth-ratio, l in 1..d_max.
ErGrResult er_gr_criteria(const Vector& eigenvalues, int d_max);

struct EdResult {
  int d = 0;
  bool converged = true;
  int iterations = 0;
};
/// Eigenvalue-difference threshold criterion (4-point calibration window, <= 50 iterations).
EdResult ed_criterion(const Vector& eigenvalues, int d_max);

struct KssCResult {
  int d = 0;
  double kappa = 0.0;
  double sig2 = 0.0;
  std::vector<double> statistics;  ///< KSS(0), KSS(1), ... up to the stopping dimension
  bool capped = false;             ///< no non-rejection before min(T,n)-1
};

/**
 * Sequential KSS test: smallest d with KSS(d) <= z_{1-level}. The smoother
 * uses kappa (GCV on W if not given); sigma^2 defaults to the smoothing-based
 * residual variance estimator. Not limited by d_max.
 */
KssCResult kss_c_criterion(const Matrix& W, std::optional<double> kappa = std::nullopt,
                           std::optional<double> sig2 = std::nullopt, double level = 0.01);

struct DimConfig {
  std::vector<Criterion> criteria;  ///< empty = all sixteen
  std::optional<int> d_max;
  std::optional<double> sig2_hat;   ///< applies to PC/IPC (and KSS.C if set)
  double level = 0.01;
  Vector c_grid = default_c_grid();
  std::vector<int> T_seq;
  std::vector<int> n_seq;
  bool standardize = false;
  std::optional<double> spar;  ///< kappa for KSS.C
};

struct DimReport {
  DimMap dims;                      ///< criterion name -> d-hat, in requested order
  std::vector<std::string> flags;   ///< e.g. "ABC.IC1: fallback to IC1"
  Vector eigen_shares;              ///< eigenvalues of W W'/(nT) divided by their sum
  int d_max_used = 0;
  double sig2_used = 0.0;           ///< sigma^2 used by PC/IPC
  std::optional<double> sig2_kss;   ///< sigma^2 used by KSS.C
  std::optional<double> kappa_kss;  ///< kappa used by KSS.C

  /// d-hat for a criterion name; throws InvalidArgument if absent.
  int at(const std::string& name) const;
};

DimReport opt_dim(const Matrix& W, const DimConfig& config = {});

}  // namespace pf
