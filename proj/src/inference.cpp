// SPDX-License-Identifier: MIT
#include "panelfactor/inference.hpp"

#include "panelfactor/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pf {

Vector hac_weights(int L) {
  if (L < 0) throw Error(ErrorCode::InvalidArgument, "HAC bandwidth must be nonnegative");
  Vector w(L + 1);
  for (int j = 0; j <= L; ++j) w(j) = 1.0 - static_cast<double>(j) / static_cast<double>(L + 1);
  return w;
}

int default_bandwidth(Index T, Index n) {
  return static_cast<int>(std::floor(std::min(std::sqrt(static_cast<double>(n)), std::sqrt(static_cast<double>(T)))));
}

namespace {

Matrix factor_projector(const Matrix& F) {
  const Index T = F.rows();
  return Matrix::Identity(T, T) - F * F.transpose() / static_cast<double>(T);
}

// n x n matrix of a_ik; zero when there are no factors.
Matrix loading_weights(const Matrix& Lambda) {
  const Index n = Lambda.rows();
  if (Lambda.cols() == 0) return Matrix::Zero(n, n);
  const Matrix gram = Lambda.transpose() * Lambda / static_cast<double>(n);
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 1e-12 * gram.diagonal().maxCoeff()).any())
    throw Error(ErrorCode::SingularLoadingGram, "loading Gram matrix is singular");
  return Lambda * ldlt.solve(Lambda.transpose());
}

Matrix loading_gram_inverse(const Matrix& Lambda) {
  const Index n = Lambda.rows();
  const Matrix gram = Lambda.transpose() * Lambda / static_cast<double>(n);
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 1e-12 * gram.diagonal().maxCoeff()).any())
    throw Error(ErrorCode::SingularLoadingGram, "loading Gram matrix is singular");
  return ldlt.solve(Matrix::Identity(gram.rows(), gram.cols()));
}

// Rows t of unit i across regressors: Z_it as a P-vector.
Vector row(const std::vector<Matrix>& Z, Index t, Index i) {
  Vector z(static_cast<Index>(Z.size()));
  for (std::size_t p = 0; p < Z.size(); ++p) z(static_cast<Index>(p)) = Z[p](t, i);
  return z;
}

// T x P block of unit i.
Matrix unit_block(const std::vector<Matrix>& Z, Index i) {
  Matrix B(Z.front().rows(), static_cast<Index>(Z.size()));
  for (std::size_t p = 0; p < Z.size(); ++p) B.col(static_cast<Index>(p)) = Z[p].col(i);
  return B;
}

Matrix sym(const Matrix& A) { return 0.5 * (A + A.transpose()); }

Matrix dz_matrix(const std::vector<Matrix>& Z, const Matrix& E, const Matrix& D0, double sig2, int id, int L) {
  const Index T = E.rows(), n = E.cols(), P = static_cast<Index>(Z.size());
  const double nT = static_cast<double>(n) * static_cast<double>(T);
  Matrix DZ = Matrix::Zero(P, P);
  switch (id) {
    case 1:
      return sig2 * D0;
    case 2: {
      for (Index i = 0; i < n; ++i) {
        const Matrix Zi = unit_block(Z, i);
        DZ += E.col(i).squaredNorm() / static_cast<double>(T) * (Zi.transpose() * Zi);
      }
      return sym(DZ / nT);
    }
    case 3: {
      const Index m = std::max<Index>(1, static_cast<Index>(std::floor(std::sqrt(static_cast<double>(n)))));
      for (Index t = 0; t < T; ++t) {
        Vector s = Vector::Zero(P);
        for (Index i = 0; i < m; ++i) s += E(t, i) * row(Z, t, i);
        DZ += s * s.transpose();
      }
      return sym(DZ / (static_cast<double>(m) * static_cast<double>(T)));
    }
    case 4: {
      for (Index t = 0; t < T; ++t) {
        const double s2t = E.row(t).squaredNorm() / static_cast<double>(n);
        for (Index i = 0; i < n; ++i) {
          const Vector z = row(Z, t, i);
          DZ += s2t * z * z.transpose();
        }
      }
      return sym(DZ / nT);
    }
    case 5: {
      const Vector w = hac_weights(L);
      for (Index t = 0; t < T; ++t)
        for (Index s = std::max<Index>(0, t - L); s <= std::min<Index>(T - 1, t + L); ++s) {
          const double rho = E.row(t).dot(E.row(s)) / static_cast<double>(n);
          const double wts = w(std::abs(t - s)) * rho;
          for (Index i = 0; i < n; ++i) DZ += wts * row(Z, t, i) * row(Z, s, i).transpose();
        }
      return sym(DZ / nT);
    }
    case 6:
    case 7: {
      for (Index t = 0; t < T; ++t)
        for (Index i = 0; i < n; ++i) {
          const Vector z = row(Z, t, i);
          DZ += E(t, i) * E(t, i) * z * z.transpose();
        }
      return sym(DZ / nT);
    }
    case 8: {
      const Vector w = hac_weights(L);
      for (Index i = 0; i < n; ++i)
        for (Index t = 0; t < T; ++t) {
          const Vector zt = row(Z, t, i);
          for (Index s = std::max<Index>(0, t - L); s <= std::min<Index>(T - 1, t + L); ++s)
            DZ += w(std::abs(t - s)) * E(t, i) * E(s, i) * zt * row(Z, s, i).transpose();
        }
      return sym(DZ / nT);
    }
    default:
      throw Error(ErrorCode::InvalidArgument, "error case must lie in 1..8");
  }
}

}  // namespace

std::vector<Matrix> projected_regressors(const Matrix& F, const Matrix& Lambda, const std::vector<Matrix>& X) {
  if (F.cols() == 0) return X;
  const Matrix M = factor_projector(F);
  const Matrix A = loading_weights(Lambda);
  const double n = static_cast<double>(Lambda.rows());
  std::vector<Matrix> Z;
  for (const Matrix& x : X) {
    const Matrix MX = M * x;
    Z.push_back(MX - MX * A.transpose() / n);
  }
  return Z;
}

std::vector<Matrix> projected_regressors(const EupFit& fit) {
  const FactorStructure fs = with_restriction(fit.factors, Restriction::RestrictFactors);
  return projected_regressors(fs.F, fs.Lambda, fit.design.X);
}

Matrix d0_matrix(const std::vector<Matrix>& Z) {
  const Index T = Z.front().rows(), n = Z.front().cols();
  return pooled_gram(Z) / (static_cast<double>(n) * static_cast<double>(T));
}

SlopeInference slope_covariance(const EupFit& fit, const ErrorCase& ec) {
  if (ec.id < 1 || ec.id > 8) throw Error(ErrorCode::InvalidArgument, "error case must lie in 1..8");
  const Matrix& E = fit.residuals;
  const Index T = E.rows(), n = E.cols(), P = fit.beta.size();
  const double nT = static_cast<double>(n) * static_cast<double>(T);
  const int L = ec.bandwidth ? *ec.bandwidth : default_bandwidth(T, n);
  if (L < 0) throw Error(ErrorCode::InvalidArgument, "HAC bandwidth must be nonnegative");
  SlopeInference inf;
  inf.error_case = ec.id;
  const std::vector<Matrix> Z = projected_regressors(fit);
  inf.D0 = d0_matrix(Z);
  Matrix D0inv;
  try {
    D0inv = inverse_spd(inf.D0, "D0");
  } catch (const Error&) {
    throw Error(ErrorCode::SingularD0, "D0 is singular: regressors lie in the factor space");
  }
  const double df = nT - static_cast<double>((n + T) * fit.d_used) - static_cast<double>(P) + 1.0;
  inf.sig2 = df > 0.0 ? fit.ssr / df : std::nan("");
  inf.DZ = dz_matrix(Z, E, inf.D0, inf.sig2, ec.id, L);
  inf.cov = sym(D0inv * inf.DZ * D0inv / nT);
  inf.se = inf.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  Eigen::SelfAdjointEigenSolver<Matrix> es(inf.cov, Eigen::EigenvaluesOnly);
  if (P > 0 && es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
    inf.flags.push_back("IndefiniteCovariance: covariance estimate is not positive semidefinite");
  return inf;
}

void bias_terms(const Matrix& F, const Matrix& Lambda, const std::vector<Matrix>& X, const Matrix& E, int id,
                int L, Vector& B, Vector& C) {
  const Index T = E.rows(), n = E.cols(), P = static_cast<Index>(X.size());
  const double dn = static_cast<double>(n), dT = static_cast<double>(T);
  const Matrix M = factor_projector(F);
  const Matrix A = loading_weights(Lambda);
  const Matrix Gm = loading_gram_inverse(Lambda);
  const Matrix D0inv = inverse_spd(d0_matrix(projected_regressors(F, Lambda, X)), "D0");

  // Cross-section term: sum_i (X_i - V_i)' F/T Gm lambda_i sigma_i^2.
  Vector bsum = Vector::Zero(P);
  for (Index i = 0; i < n; ++i) {
    Matrix XV = unit_block(X, i);
    for (Index j = 0; j < n; ++j) XV -= A(i, j) / dn * unit_block(X, j);
    const double s2i = E.col(i).squaredNorm() / dT;
    bsum += (XV.transpose() * F / dT) * (Gm * Lambda.row(i).transpose()) * s2i;
  }
  B = -D0inv * bsum / dn;

  // Time term with the averaged error covariance Omega.
  Matrix Omega = Matrix::Zero(T, T);
  if (id == 7) {
    for (Index t = 0; t < T; ++t) Omega(t, t) = E.row(t).squaredNorm() / dn;
  } else {
    const Vector w = hac_weights(L);
    for (Index t = 0; t < T; ++t)
      for (Index s = std::max<Index>(0, t - L); s <= std::min<Index>(T - 1, t + L); ++s)
        Omega(t, s) = w(std::abs(t - s)) * E.row(t).dot(E.row(s)) / dn;
  }
  const Matrix MOF = M * Omega * F / dT;
  Vector csum = Vector::Zero(P);
  for (Index i = 0; i < n; ++i) csum += unit_block(X, i).transpose() * MOF * (Gm * Lambda.row(i).transpose());
  C = -D0inv * csum / dn;
}

SlopeInference bias_correct(const EupFit& fit, const ErrorCase& ec) {
  if (ec.id != 7 && ec.id != 8) throw Error(ErrorCode::InvalidArgument, "bias correction applies to cases 7 and 8");
  if (fit.d_used < 1) throw Error(ErrorCode::InvalidArgument, "bias correction requires at least one factor");
  SlopeInference inf = slope_covariance(fit, ec);
  const FactorStructure fs = with_restriction(fit.factors, Restriction::RestrictFactors);
  const Index T = fit.residuals.rows(), n = fit.residuals.cols();
  const int L = ec.bandwidth ? *ec.bandwidth : default_bandwidth(T, n);
  Vector B, C;
  bias_terms(fs.F, fs.Lambda, fit.design.X, fit.residuals, ec.id, L, B, C);
  inf.bias_B = B;
  inf.bias_C = C;
  inf.beta_star = fit.beta - B / static_cast<double>(n) - C / static_cast<double>(T);
  return inf;
}

SummaryTable eup_summary(const EupFit& fit, const SlopeInference& inf) {
  SummaryTable s;
  const Vector& est = inf.beta_star ? *inf.beta_star : fit.beta;
  s.coefficients = coefficient_rows(fit.regressor_names, est, inf.se);
  s.residual_quantiles = residual_quantiles(fit.residuals);
  s.r_squared = fit.r_squared;
  return s;
}

}  // namespace pf
