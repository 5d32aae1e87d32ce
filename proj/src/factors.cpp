// SPDX-License-Identifier: MIT
#include "panelfactor/factors.hpp"

#include "panelfactor/errors.hpp"

#include <cmath>

namespace pf {

std::string to_string(Restriction r) {
  return r == Restriction::RestrictFactors ? "restrict.factors" : "restrict.loadings";
}

Restriction parse_restriction(const std::string& name) {
  if (name == "restrict.factors" || name == "factors") return Restriction::RestrictFactors;
  if (name == "restrict.loadings" || name == "loadings") return Restriction::RestrictLoadings;
  throw Error(ErrorCode::InvalidArgument, "unknown restriction '" + name + "'");
}

EigenDecomposition symmetric_eigen(const Matrix& S) {
  if (!S.allFinite()) throw Error(ErrorCode::NonFinite, "covariance contains non-finite values");
  Matrix sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Index k = sym.rows();
  EigenDecomposition out;
  out.values.resize(k);
  out.vectors.resize(k, k);
  // Eigen returns ascending order; reverse it. Ties keep the solver's order,
  // which is deterministic for identical input.
  for (Index j = 0; j < k; ++j) {
    out.values(j) = es.eigenvalues()(k - 1 - j);
    out.vectors.col(j) = es.eigenvectors().col(k - 1 - j);
  }
  const double top = k > 0 ? std::max(out.values(0), 0.0) : 0.0;
  for (Index j = 0; j < k; ++j) {
    if (out.values(j) < 0.0 || std::abs(out.values(j)) < 1e-12 * top) out.values(j) = std::max(0.0, out.values(j));
    if (std::abs(out.values(j)) < 1e-12 * top) out.values(j) = 0.0;
    // Sign convention: entry of largest magnitude is positive (first on ties).
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < k; ++i) {
      double a = std::abs(out.vectors(i, j));
      if (a > best + 1e-14) {
        best = a;
        arg = i;
      }
    }
    if (out.vectors(arg, j) < 0.0) out.vectors.col(j) *= -1.0;
  }
  return out;
}

Matrix standardize_panel(const Matrix& W) {
  const double N = static_cast<double>(W.size());
  const double mean = stable_sum(W) / N;
  const double var = (W.array() - mean).square().sum() / (N - 1.0);
  if (!(var > 0.0)) throw Error(ErrorCode::DegenerateInput, "cannot standardize a constant panel");
  return W / std::sqrt(var);
}

EigenDecomposition covariance_eigen(const Matrix& W, bool standardize, Scaling scaling) {
  if (!W.allFinite()) throw Error(ErrorCode::NonFinite, "panel contains non-finite values");
  Matrix M = standardize ? standardize_panel(W) : W;
  const double n = static_cast<double>(M.cols());
  const double T = static_cast<double>(M.rows());
  const double denom = scaling == Scaling::Kss ? n : n * T;
  Matrix S = (M * M.transpose()) / denom;
  return symmetric_eigen(S);
}

Matrix FactorStructure::common() const {
  if (d == 0) return Matrix::Zero(F.rows(), Lambda.rows());
  return F * Lambda.transpose();
}

FactorStructure factors_from_eigen(const Matrix& W, const EigenDecomposition& eig, int d, Restriction restriction) {
  const Index T = W.rows();
  if (d < 0 || d > std::min<Index>(T, W.cols()))
    throw Error(ErrorCode::DimensionTooLarge, "factor dimension " + std::to_string(d) + " outside [0, min(T,n)]");
  FactorStructure fs;
  fs.d = d;
  fs.eigenvalues = eig.values;
  fs.restriction = Restriction::RestrictFactors;
  fs.F = std::sqrt(static_cast<double>(T)) * eig.vectors.leftCols(d);
  fs.Lambda = W.transpose() * fs.F / static_cast<double>(T);
  if (restriction != Restriction::RestrictFactors) return with_restriction(fs, restriction);
  return fs;
}

FactorStructure extract_factors(const Matrix& W, int d, Scaling scaling, Restriction restriction) {
  return factors_from_eigen(W, covariance_eigen(W, false, scaling), d, restriction);
}

FactorStructure with_restriction(const FactorStructure& fs, Restriction restriction) {
  if (fs.restriction == restriction || fs.d == 0) {
    FactorStructure out = fs;
    out.restriction = restriction;
    return out;
  }
  FactorStructure out = fs;
  out.restriction = restriction;
  const double T = static_cast<double>(fs.F.rows());
  const double n = static_cast<double>(fs.Lambda.rows());
  for (int l = 0; l < fs.d; ++l) {
    if (restriction == Restriction::RestrictLoadings) {
      // F'F/T = I, Lambda'Lambda diagonal  ->  Lambda'Lambda/n = I, F'F diagonal.
      double c = std::sqrt(fs.Lambda.col(l).squaredNorm() / n);
      if (c == 0.0) continue;
      out.Lambda.col(l) = fs.Lambda.col(l) / c;
      out.F.col(l) = fs.F.col(l) * c;
    } else {
      double c = std::sqrt(fs.F.col(l).squaredNorm() / T);
      if (c == 0.0) continue;
      out.F.col(l) = fs.F.col(l) / c;
      out.Lambda.col(l) = fs.Lambda.col(l) * c;
    }
  }
  return out;
}

Vector variance_shares(const FactorStructure& fs) {
  if (fs.d < 1) throw Error(ErrorCode::EmptyStructure, "variance shares need at least one factor");
  // Shares are defined on the loadings under the factor normalisation.
  const FactorStructure base = with_restriction(fs, Restriction::RestrictFactors);
  const double n = static_cast<double>(base.Lambda.rows());
  Vector v(fs.d);
  for (int l = 0; l < fs.d; ++l) {
    const double mean = base.Lambda.col(l).mean();
    v(l) = (base.Lambda.col(l).array() - mean).square().sum() / (n - 1.0);
  }
  const double total = v.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::EmptyStructure, "loadings have zero variance");
  return v / total;
}

}  // namespace pf
