// SPDX-License-Identifier: MIT
#include "panelfactor/kss.hpp"

#include "panelfactor/eup.hpp"
#include "panelfactor/errors.hpp"
#include "panelfactor/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pf {

Vector kss_beta(const Design& design, double kappa) {
  SplineSystem sys(design.T());
  const Matrix IZ = Matrix::Identity(design.T(), design.T()) - sys.smoother_matrix(kappa);
  return solve_spd(weighted_gram(design.X, IZ), weighted_cross(design.X, IZ, design.Y), "smoothed regressors");
}

std::vector<double> kss_cascade_objective(const Design& design, double kappa, Vector beta, int sweeps) {
  SplineSystem sys(design.T());
  const Matrix Z = sys.smoother_matrix(kappa);
  const Matrix XtX = pooled_gram(design.X);
  auto objective = [&](const Vector& b, const Matrix& zeta) {
    const Matrix r = residual_panel(design.Y, design.X, b) - zeta;
    return r.squaredNorm() + kappa * (zeta.transpose() * sys.penalty() * zeta).trace();
  };
  std::vector<double> history;
  for (int s = 0; s < sweeps; ++s) {
    const Matrix zeta = Z * residual_panel(design.Y, design.X, beta);
    history.push_back(objective(beta, zeta));
    beta = solve_spd(XtX, pooled_cross(design.X, design.Y - zeta), "pooled regressors");
    history.push_back(objective(beta, zeta));
  }
  return history;
}

namespace {

struct Cascade {
  Vector beta;
  double kappa = 0.0;
  int iterations = 0;
  bool converged = true;
};

double select_kappa(const SplineSystem& sys, const Matrix& W) { return sys.gcv_select(W).kappa; }

double log_kappa_change(double a, double b) {
  if (std::isinf(a) && std::isinf(b)) return 0.0;
  if (std::isinf(a) || std::isinf(b) || a <= 0.0 || b <= 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(std::log(a / b));
}

// Alternates the closed-form slopes at fixed kappa with GCV re-selection of kappa.
Cascade run_cascade(const Design& ds, const KssOptions& opt, const SplineSystem& sys) {
  Cascade c;
  const int d_start = std::min(default_d_max(ds.T(), ds.n()), static_cast<int>(std::min(ds.T(), ds.n())) - 1);
  c.beta = eup_start_beta(ds.Y, ds.X, std::max(d_start, 0));
  if (opt.spar) {
    if (*opt.spar < 0.0) throw Error(ErrorCode::NegativeKappa, "spar must be nonnegative");
    c.kappa = *opt.spar;
    c.beta = kss_beta(ds, c.kappa);
    c.iterations = 1;
    return c;
  }
  c.kappa = select_kappa(sys, residual_panel(ds.Y, ds.X, c.beta));
  c.converged = false;
  while (c.iterations < opt.max_iteration) {
    Vector next = kss_beta(ds, c.kappa);
    const double next_kappa = select_kappa(sys, residual_panel(ds.Y, ds.X, next));
    ++c.iterations;
    double change = log_kappa_change(next_kappa, c.kappa);
    for (Index j = 0; j < next.size(); ++j)
      change = std::max(change, std::abs(next(j) - c.beta(j)) / std::max(std::abs(c.beta(j)), 1e-10));
    c.beta = next;
    c.kappa = next_kappa;
    if (change < opt.convergence) {
      c.converged = true;
      break;
    }
  }
  // Slopes always satisfy the closed form at the reported kappa.
  c.beta = kss_beta(ds, c.kappa);
  return c;
}

void check_options(const KssOptions& opt) {
  if (!(opt.level > 0.0 && opt.level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  if (!(opt.convergence > 0.0) || opt.max_iteration < 1)
    throw Error(ErrorCode::InvalidArgument, "convergence and max_iteration must be positive");
}

bool is_zero_panel(const Matrix& W, const Matrix& Y) {
  return W.squaredNorm() <= 1e-24 * std::max(1.0, Y.squaredNorm());
}

// Leave-one-unit-out prediction error of the d-factor fit at a given kappa.
double cv_score(const Design& ds, const SplineSystem& sys, double kappa, int d) {
  const Index T = ds.T(), n = ds.n(), P = ds.P();
  const Matrix Z = sys.smoother_matrix(kappa);
  const Matrix IZ = Matrix::Identity(T, T) - Z;
  const Matrix A = weighted_gram(ds.X, IZ);
  const Vector c = weighted_cross(ds.X, IZ, ds.Y);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    Matrix Xi(T, P);
    for (Index p = 0; p < P; ++p) Xi.col(p) = ds.X[static_cast<std::size_t>(p)].col(i);
    const Vector yi = ds.Y.col(i);
    const Vector b = solve_spd(A - Xi.transpose() * IZ * Xi, c - Xi.transpose() * IZ * yi, "leave-one-out design");
    Matrix Wm(T, n - 1);
    for (Index k = 0, col = 0; k < n; ++k) {
      if (k == i) continue;
      Wm.col(col) = ds.Y.col(k);
      for (Index p = 0; p < P; ++p) Wm.col(col) -= b(p) * ds.X[static_cast<std::size_t>(p)].col(k);
      ++col;
    }
    const Vector wi = yi - Xi * b;
    Vector fit = Vector::Zero(T);
    if (d > 0) {
      const Matrix Vt = Z * Wm;
      EigenDecomposition eig = symmetric_eigen(Vt * Vt.transpose() / static_cast<double>(n - 1));
      const Matrix G = eig.vectors.leftCols(d);
      fit = G * (G.transpose() * wi);
    }
    total += (wi - fit).squaredNorm();
  }
  return total;
}

}  // namespace

KssFit kss_fit(const PanelSet& data, const KssOptions& opt) {
  check_options(opt);
  if (opt.consult_dim && !opt.factor_dim)
    throw Error(ErrorCode::InvalidArgument, "consult_dim shows the criterion table only; set factor_dim to proceed");
  KssFit fit;
  fit.design = prepare_design(data, opt.effects);
  const Design& ds = fit.design;
  const Index T = ds.T(), n = ds.n(), P = ds.P();
  if (T < 4) throw Error(ErrorCode::TooShort, "at least four time periods are required for spline smoothing");
  const int cap = static_cast<int>(std::min(T, n)) - 1;
  if (opt.factor_dim && (*opt.factor_dim < 0 || *opt.factor_dim > cap))
    throw Error(ErrorCode::DimensionTooLarge, "factor_dim must lie in [0, min(T,n)-1]");
  if (opt.cv && opt.spar) throw Error(ErrorCode::InvalidArgument, "cv and spar are mutually exclusive");

  SplineSystem sys(T);
  Cascade c = run_cascade(ds, opt, sys);
  fit.beta = c.beta;
  fit.kappa = c.kappa;
  fit.kappa_gcv = c.kappa;
  fit.iterations = c.iterations;
  fit.converged = c.converged;
  if (!c.converged) fit.flags.push_back("NoConvergence: iteration cap reached; last iterate returned");
  fit.regressor_names = ds.names;
  fit.W = residual_panel(ds.Y, ds.X, fit.beta);

  if (opt.consult_dim) {
    DimConfig cfg;
    cfg.level = opt.level;
    cfg.spar = fit.kappa;
    fit.consult = opt_dim(fit.W, cfg);
  }

  // Dimension.
  if (opt.factor_dim) {
    fit.d_used = *opt.factor_dim;
    fit.used_dim_criterion = "fixed";
  } else if (is_zero_panel(fit.W, ds.Y)) {
    fit.d_used = 0;
    fit.used_dim_criterion = "KSS.C";
    fit.flags.push_back("ZeroResidual: Y - X beta vanishes; no factor structure");
  } else {
    KssCResult kc = kss_c_criterion(fit.W, fit.kappa, std::nullopt, opt.level);
    fit.d_used = kc.d;
    fit.dim_statistics = kc.statistics;
    fit.used_dim_criterion = "KSS.C";
    if (kc.capped) fit.flags.push_back("KSS.C: no acceptance before min(T,n)-1");
  }

  // Optional leave-one-unit-out refinement of kappa below the GCV value, d fixed.
  if (opt.cv && std::isfinite(fit.kappa) && fit.kappa > 0.0) {
    const int points = 16;
    double best = std::numeric_limits<double>::infinity(), best_kappa = fit.kappa;
    for (int k = 0; k < points; ++k) {
      const double kappa = fit.kappa * std::pow(10.0, -3.0 + 3.0 * k / (points - 1));
      const double score = cv_score(ds, sys, kappa, fit.d_used);
      fit.cv_scores.emplace_back(kappa, score);
      if (score < best) {
        best = score;
        best_kappa = kappa;
      }
    }
    fit.kappa = best_kappa;
    fit.beta = kss_beta(ds, fit.kappa);
    fit.W = residual_panel(ds.Y, ds.X, fit.beta);
  }

  // Functional principal components of the smoothed residual curves.
  const Matrix Z = sys.smoother_matrix(fit.kappa);
  const Matrix IZ = Matrix::Identity(T, T) - Z;
  const Matrix Vt = Z * fit.W;
  EigenDecomposition eig = symmetric_eigen(Vt * Vt.transpose() / static_cast<double>(n));
  fit.factors = factors_from_eigen(fit.W, eig, fit.d_used, opt.restriction);
  fit.v_hat = fit.factors.common();

  fit.has_intercept = ds.intercept;
  fit.additive = recover_additive_effects(residual_panel(ds.Y_raw, ds.X_raw, fit.beta), ds.effects, ds.intercept);
  fit.intercept = fit.additive.mu;
  fit.residuals = residual_panel(ds.Y_raw, ds.X_raw, fit.beta) - additive_surface(fit.additive, T, n) - fit.v_hat;

  fit.ssr = fit.residuals.squaredNorm();
  const double nT = static_cast<double>(n) * static_cast<double>(T);
  fit.df = static_cast<int>(nT) - static_cast<int>(n + T) * fit.d_used - static_cast<int>(P) - ds.additive_dof;
  if (fit.df <= 0) throw Error(ErrorCode::DegenerateVariance, "no residual degrees of freedom left");
  fit.sig2 = fit.ssr / fit.df;
  const double ymean = stable_sum(ds.Y) / nT;
  const double sst = (ds.Y.array() - ymean).square().sum();
  fit.r_squared = sst > 0.0 ? 1.0 - fit.ssr / sst : 1.0;

  const Matrix Ainv = inverse_spd(weighted_gram(ds.X, IZ), "smoothed regressors");
  const Matrix B = weighted_gram(ds.X, IZ * IZ);
  fit.beta_cov = fit.sig2 * Ainv * B * Ainv;
  fit.beta_cov = 0.5 * (fit.beta_cov + fit.beta_cov.transpose());
  if (ds.intercept) fit.intercept_se = std::sqrt(fit.sig2 / nT + ds.xbar.dot(fit.beta_cov * ds.xbar));
  return fit;
}

DimReport kss_consult(const PanelSet& data, const KssOptions& opt) {
  check_options(opt);
  Design ds = prepare_design(data, opt.effects);
  SplineSystem sys(ds.T());
  Cascade c = run_cascade(ds, opt, sys);
  DimConfig cfg;
  cfg.level = opt.level;
  cfg.spar = c.kappa;
  return opt_dim(residual_panel(ds.Y, ds.X, c.beta), cfg);
}

SummaryTable kss_summary(const KssFit& fit) {
  SummaryTable s;
  std::vector<std::string> names;
  const Index P = fit.beta.size();
  const Index off = fit.has_intercept ? 1 : 0;
  Vector est(P + off), se(P + off);
  if (fit.has_intercept) {
    names.emplace_back("(Intercept)");
    est(0) = fit.intercept;
    se(0) = fit.intercept_se;
  }
  for (Index j = 0; j < P; ++j) {
    names.push_back(fit.regressor_names.at(static_cast<std::size_t>(j)));
    est(off + j) = fit.beta(j);
    se(off + j) = std::sqrt(std::max(fit.beta_cov(j, j), 0.0));
  }
  s.coefficients = coefficient_rows(names, est, se);
  s.residual_quantiles = residual_quantiles(fit.residuals);
  s.r_squared = fit.r_squared;
  return s;
}

}  // namespace pf
