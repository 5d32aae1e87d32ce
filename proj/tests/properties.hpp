// SPDX-License-Identifier: MIT
/**
 * @file properties.hpp
 * @brief Property checks shared by the unit tests and the acceptance report.
 *        Each check returns a verdict plus a one-line numeric detail.
 */
#pragma once

#include "panelfactor/panelfactor.hpp"
#include "simulate.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace pf::testing {

struct Check {
  bool ok = false;
  std::string detail;
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Adding any a_i + b_t surface leaves the twoways within transform unchanged; the surface itself maps to zero.
inline Check within_annihilation() {
  Rng rng(11);
  const Matrix X = rng.normal(12, 9);
  const Vector a = rng.normal_vec(9), b = rng.normal_vec(12);
  Matrix surf = Matrix::Zero(12, 9);
  surf.rowwise() += a.transpose();
  surf.colwise() += b;
  double worst = within_transform(surf, Effects::Twoways).cwiseAbs().maxCoeff();
  worst = std::max(worst, (within_transform(Matrix(X + surf), Effects::Twoways) -
                           within_transform(X, Effects::Twoways)).cwiseAbs().maxCoeff());
  Matrix ind = Matrix::Zero(12, 9);
  ind.rowwise() += a.transpose();
  worst = std::max(worst, within_transform(ind, Effects::Individual).cwiseAbs().maxCoeff());
  Matrix tim = Matrix::Zero(12, 9);
  tim.colwise() += b;
  worst = std::max(worst, within_transform(tim, Effects::Time).cwiseAbs().maxCoeff());
  return {worst < 1e-12, "max residual " + fmt(worst)};
}

/// tr Z_kappa = T at kappa = 0 and tends to 2 as kappa grows.
inline Check smoother_trace_limits() {
  SplineSystem sys(30);
  const double t0 = sys.trace(0.0), tbig = sys.trace(1e12), tinf = sys.trace(INFINITY);
  const bool ok = std::abs(t0 - 30.0) < 1e-10 && std::abs(tbig - 2.0) < 1e-6 && std::abs(tinf - 2.0) < 1e-12;
  return {ok, "tr(0)=" + fmt(t0) + " tr(1e12)=" + fmt(tbig) + " tr(inf)=" + fmt(tinf)};
}

/// F'F/T = I and switching the normalisation leaves F Lambda' unchanged.
inline Check factor_orthonormality() {
  Rng rng(12);
  const Matrix W = low_rank_panel(rng, 25, 40, 3, 0.1);
  FactorStructure fs = extract_factors(W, 3, Scaling::Eup);
  const double orth = (fs.F.transpose() * fs.F / 25.0 - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff();
  FactorStructure fl = with_restriction(fs, Restriction::RestrictLoadings);
  const double lorth = (fl.Lambda.transpose() * fl.Lambda / 40.0 - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff();
  const double inv = (fl.common() - fs.common()).cwiseAbs().maxCoeff();
  const double back = (with_restriction(fl, Restriction::RestrictFactors).common() - fs.common()).cwiseAbs().maxCoeff();
  const bool ok = orth < 1e-10 && lorth < 1e-10 && inv < 1e-10 && back < 1e-10;
  return {ok, "|F'F/T-I|=" + fmt(orth) + " |L'L/n-I|=" + fmt(lorth) + " |dFL'|=" + fmt(std::max(inv, back))};
}

/// Objective (SSR) is non-increasing across sweeps at fixed d.
inline Check eup_monotonicity() {
  Rng rng(13);
  const Index T = 30, n = 40;
  const Matrix F = rng.normal(T, 2), L = rng.normal(n, 2);
  const Matrix X = rng.normal(T, n) + F * rng.normal(n, 2).transpose();
  const Matrix Y = 1.5 * X + F * L.transpose() + 0.3 * rng.normal(T, n);
  EupOptions opt;
  opt.factor_dim = 2;
  opt.start_beta = Vector::Zero(1);
  opt.convergence = 1e-10;
  EupFit fit = eup_fit(make_set(Y, {X}), opt);
  double worst = 0.0;
  const auto& h = fit.objective_history;
  for (std::size_t k = 1; k < h.size(); ++k) worst = std::max(worst, (h[k] - h[k - 1]) / h[k - 1]);
  return {h.size() > 2 && worst <= 1e-12,
          std::to_string(h.size()) + " sweeps, largest relative increase " + fmt(worst)};
}

/// Exact rank-3 panel with demeaned loadings (so the grand-mean centring used
/// by ER keeps the rank at 3): PC1-3, IC1-3 and ER recover d = 3.
inline Check noiseless_rank_recovery() {
  Rng rng(14);
  const Matrix F = rng.normal(40, 3);
  Matrix L = rng.normal(60, 3);
  L.rowwise() -= L.colwise().mean();
  const Matrix W = F * L.transpose();
  DimConfig cfg;
  cfg.criteria = {Criterion::PC1, Criterion::PC2, Criterion::PC3, Criterion::IC1,
                  Criterion::IC2, Criterion::IC3, Criterion::ER};
  cfg.d_max = 6;
  DimReport rep = opt_dim(W, cfg);
  bool ok = true;
  std::string detail;
  for (const auto& [name, d] : rep.dims) {
    ok = ok && d == 3;
    detail += name + "=" + std::to_string(d) + " ";
  }
  return {ok, detail};
}

/// Monte-Carlo size of the factor-existence test under additive effects only.
inline Check factor_test_size(int seeds = 200, double level = 0.01) {
  int rejections = 0;
  for (int s = 0; s < seeds; ++s) {
    TestResult r = factor_existence_test(additive_null_panel(static_cast<std::uint64_t>(1000 + s), 30, 30),
                                         Effects::Twoways, level);
    if (r.decision == Decision::Reject) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / seeds;
  return {rate <= 2.0 * level, "rejection rate " + fmt(rate) + " at level " + fmt(level) + " over " +
                                   std::to_string(seeds) + " seeds"};
}

/// Bias correction moves the slopes closer to the truth in most heteroskedastic samples.
inline Check bias_correction_improves(int seeds = 50) {
  int better = 0;
  for (int s = 0; s < seeds; ++s) {
    BiasPanel p = heteroskedastic_factor_panel(static_cast<std::uint64_t>(2000 + s));
    EupOptions opt;
    opt.factor_dim = 2;
    opt.convergence = 1e-9;
    EupFit fit = eup_fit(p.data, opt);
    SlopeInference inf = bias_correct(fit, ErrorCase{7, std::nullopt});
    if ((*inf.beta_star - p.beta0).norm() < (fit.beta - p.beta0).norm()) ++better;
  }
  const double rate = static_cast<double>(better) / seeds;
  return {rate >= 0.70, "improved in " + fmt(100.0 * rate) + "% of " + std::to_string(seeds) + " seeds"};
}

}  // namespace pf::testing
