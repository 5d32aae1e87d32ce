// SPDX-License-Identifier: MIT
#include "panelfactor/eup.hpp"

#include "panelfactor/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pf {

Vector eup_start_beta(const Matrix& Y, const std::vector<Matrix>& X, int d_max) {
  const Index T = Y.rows(), n = Y.cols();
  const Index P = static_cast<Index>(X.size());
  if (d_max < 0 || d_max > T) throw Error(ErrorCode::InvalidArgument, "d_max out of range for start values");
  Matrix A(T, n * (P + 1));
  A.leftCols(n) = Y;
  for (Index p = 0; p < P; ++p) A.middleCols(n * (p + 1), n) = X[static_cast<std::size_t>(p)];
  Matrix Mproj = Matrix::Identity(T, T);
  if (d_max > 0) {
    EigenDecomposition eig = symmetric_eigen(A * A.transpose() / (static_cast<double>(n) * static_cast<double>(T)));
    Matrix G = eig.vectors.leftCols(d_max);
    // Under-scale start factors that live in the regressors' time profile.
    Matrix Xbar(T, P);
    for (Index p = 0; p < P; ++p) Xbar.col(p) = row_means(X[static_cast<std::size_t>(p)]);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Xbar);
    for (Index l = 0; l < d_max; ++l) {
      Vector g = G.col(l);
      Vector fit = Xbar * cod.solve(g);
      const double r2 = std::clamp(fit.squaredNorm() / g.squaredNorm(), 0.0, 1.0);
      G.col(l) *= (1.0 - r2);
    }
    Mproj -= G * G.transpose();
  }
  return solve_spd(weighted_gram(X, Mproj), weighted_cross(X, Mproj, Y), "start values");
}

Vector eup_start_beta(const PanelSet& data, int d_max) {
  Design d = prepare_design(data, Effects::None);
  return eup_start_beta(d.Y, d.X, d_max);
}

namespace {

double max_relative_change(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (Index j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a(j) - b(j)) / std::max(std::abs(b(j)), 1e-10));
  return m;
}

// Principal components of W: F = sqrt(T) * leading eigenvectors, Lambda = W'F/T.
void pca_step(const Matrix& W, int d, Matrix& F, Matrix& Lambda) {
  const Index T = W.rows();
  if (d == 0) {
    F = Matrix::Zero(T, 0);
    Lambda = Matrix::Zero(W.cols(), 0);
    return;
  }
  EigenDecomposition eig = covariance_eigen(W, false, Scaling::Eup);
  F = std::sqrt(static_cast<double>(T)) * eig.vectors.leftCols(d);
  Lambda = W.transpose() * F / static_cast<double>(T);
}

class EupSolver {
 public:
  EupSolver(const Design& design, const EupOptions& opt) : d_(design), opt_(opt) {
    XtX_ = pooled_gram(d_.X);
    solve_spd(XtX_, Vector::Zero(d_.P()), "pooled regressors");
  }

  // One sweep at fixed dimension: PCA on the current residual, then least squares.
  Vector sweep(const Vector& beta, int d, double& objective) {
    Matrix W = residual_panel(d_.Y, d_.X, beta);
    Matrix F, L;
    pca_step(W, d, F, L);
    Matrix target = d > 0 ? Matrix(d_.Y - F * L.transpose()) : d_.Y;
    Vector next = solve_spd(XtX_, pooled_cross(d_.X, target), "pooled regressors");
    objective = (residual_panel(target, d_.X, next)).squaredNorm();
    return next;
  }

  // Iterates sweeps at fixed d until the relative change falls below tolerance.
  Vector inner(Vector beta, int d, int& iterations, bool& converged, std::vector<double>& history) {
    converged = false;
    while (iterations < opt_.max_iteration) {
      double obj = 0.0;
      Vector next = sweep(beta, d, obj);
      ++iterations;
      history.push_back(obj);
      const double change = max_relative_change(next, beta);
      beta = next;
      if (change < opt_.convergence || d == 0) {
        converged = true;
        break;
      }
    }
    return beta;
  }

  int update_dimension(const Vector& beta, int d, int d_max) const {
    Matrix W = residual_panel(d_.Y, d_.X, beta);
    Vector V = tail_sums(eup_eigenvalues(W), d_max);
    const double sig2 = V(std::min(d, d_max));
    return select_penalized(opt_.dim_criterion, V, static_cast<double>(d_.n()), static_cast<double>(d_.T()), sig2,
                            d_max);
  }

 private:
  const Design& d_;
  const EupOptions& opt_;
  Matrix XtX_;
};

}  // namespace

EupFit eup_fit(const PanelSet& data, const EupOptions& opt) {
  if (!is_penalized(opt.dim_criterion))
    throw Error(ErrorCode::InvalidArgument,
                "dimension criterion " + criterion_name(opt.dim_criterion) + " cannot drive the Eup update");
  if (opt.max_iteration < 1 || !(opt.convergence > 0.0))
    throw Error(ErrorCode::InvalidArgument, "max_iteration and convergence must be positive");
  EupFit fit;
  fit.design = prepare_design(data, opt.effects);
  const Design& ds = fit.design;
  const Index T = ds.T(), n = ds.n(), P = ds.P();
  fit.d_max = opt.d_max ? *opt.d_max : default_d_max(T, n);
  if (fit.d_max < 0 || fit.d_max > std::min(T, n) - 1)
    throw Error(ErrorCode::DimensionTooLarge, "d_max must lie in [0, min(T,n)-1]");
  if (opt.factor_dim && (*opt.factor_dim < 0 || *opt.factor_dim > std::min(T, n) - 1))
    throw Error(ErrorCode::DimensionTooLarge, "factor_dim must lie in [0, min(T,n)-1]");
  fit.dim_criterion = opt.factor_dim ? "fixed" : criterion_name(opt.dim_criterion);

  EupSolver solver(ds, opt);
  Vector beta;
  if (opt.start_beta) {
    if (opt.start_beta->size() != P) throw Error(ErrorCode::InvalidArgument, "start_beta has wrong length");
    beta = *opt.start_beta;
  } else {
    beta = eup_start_beta(ds.Y, ds.X, std::max(fit.d_max, opt.factor_dim.value_or(0)));
  }

  int d = opt.factor_dim ? *opt.factor_dim : fit.d_max;
  bool converged = false;
  if (opt.factor_dim) {
    beta = solver.inner(beta, d, fit.iterations, converged, fit.objective_history);
    fit.dimension_history.push_back(d);
  } else if (opt.double_iteration) {
    std::vector<int>& hist = fit.dimension_history;
    while (true) {
      hist.push_back(d);
      beta = solver.inner(beta, d, fit.iterations, converged, fit.objective_history);
      int next = solver.update_dimension(beta, d, fit.d_max);
      if (next == d) break;
      // Oscillation guard: an A-B-A-B pattern repeated more than five times.
      int flips = 0;
      for (std::size_t k = 2; k < hist.size(); ++k)
        if (hist[k] == hist[k - 2] && hist[k] != hist[k - 1]) ++flips;
      if (flips > 5) {
        d = std::min(d, next);
        fit.flags.push_back("OscillatingDimension: dimension update cycles; smaller dimension kept");
        beta = solver.inner(beta, d, fit.iterations, converged, fit.objective_history);
        break;
      }
      if (fit.iterations >= opt.max_iteration) {
        converged = false;
        break;
      }
      d = next;
    }
  } else {
    // Single iteration: the dimension is re-selected at every sweep.
    converged = false;
    while (fit.iterations < opt.max_iteration) {
      int next = solver.update_dimension(beta, d, fit.d_max);
      fit.dimension_history.push_back(next);
      double obj = 0.0;
      Vector nb = solver.sweep(beta, next, obj);
      ++fit.iterations;
      fit.objective_history.push_back(obj);
      const double change = max_relative_change(nb, beta);
      beta = nb;
      const bool stable = next == d;
      d = next;
      if (stable && change < opt.convergence) {
        converged = true;
        break;
      }
    }
  }
  fit.converged = converged;
  if (!converged) fit.flags.push_back("NoConvergence: iteration cap reached; last iterate returned");

  fit.beta = beta;
  fit.regressor_names = ds.names;
  fit.d_used = d;
  fit.W = residual_panel(ds.Y, ds.X, beta);
  fit.factors = extract_factors(fit.W, d, Scaling::Eup, opt.restriction);
  fit.residuals = fit.W - fit.factors.common();
  fit.has_intercept = ds.intercept;
  fit.additive = recover_additive_effects(residual_panel(ds.Y_raw, ds.X_raw, beta), ds.effects, ds.intercept);
  fit.intercept = fit.additive.mu;
  fit.ssr = fit.residuals.squaredNorm();
  const double nT = static_cast<double>(n) * static_cast<double>(T);
  fit.sig2 = fit.ssr / nT;
  fit.df = static_cast<int>(nT) - static_cast<int>(n + T) * d - static_cast<int>(P) - ds.additive_dof;
  fit.residual_scale = fit.df > 0 ? std::sqrt(fit.ssr / fit.df) : std::nan("");
  const double ymean = stable_sum(ds.Y) / nT;
  fit.r_squared = 1.0 - fit.ssr / (ds.Y.array() - ymean).square().sum();
  return fit;
}

}  // namespace pf
