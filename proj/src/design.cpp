// SPDX-License-Identifier: MIT
#include "panelfactor/design.hpp"

#include "panelfactor/errors.hpp"
#include "panelfactor/stats.hpp"

#include <algorithm>
#include <cmath>

namespace pf {

Design prepare_design(const PanelSet& data, Effects effects) {
  data.validate();
  if (data.P() < 1) throw Error(ErrorCode::InvalidArgument, "at least one regressor is required");
  Design d;
  d.effects = effects;
  d.intercept = data.has_intercept || effects == Effects::Twoways;
  d.names = data.regressor_names;
  d.Y_raw = data.response.values;
  d.ybar = stable_sum(d.Y_raw) / static_cast<double>(d.Y_raw.size());
  d.xbar.resize(data.P());
  for (Index p = 0; p < data.P(); ++p) {
    d.X_raw.push_back(data.regressors[static_cast<std::size_t>(p)].values);
    d.xbar(p) = stable_sum(d.X_raw.back()) / static_cast<double>(d.X_raw.back().size());
  }
  auto transform = [&](const Matrix& M, double mean) -> Matrix {
    if (effects == Effects::None) {
      if (d.intercept) return (M.array() - mean).matrix();
      return M;
    }
    return within_transform(M, effects);
  };
  d.Y = transform(d.Y_raw, d.ybar);
  for (Index p = 0; p < data.P(); ++p) d.X.push_back(transform(d.X_raw[static_cast<std::size_t>(p)], d.xbar(p)));
  const int T = static_cast<int>(data.T()), n = static_cast<int>(data.n());
  switch (effects) {
    case Effects::None: d.additive_dof = d.intercept ? 1 : 0; break;
    case Effects::Individual: d.additive_dof = n; break;
    case Effects::Time: d.additive_dof = T; break;
    case Effects::Twoways: d.additive_dof = n + T - 1; break;
  }
  return d;
}

Matrix pooled_gram(const std::vector<Matrix>& X) {
  const Index P = static_cast<Index>(X.size());
  Matrix G(P, P);
  for (Index p = 0; p < P; ++p)
    for (Index q = p; q < P; ++q) {
      G(p, q) = (X[static_cast<std::size_t>(p)].array() * X[static_cast<std::size_t>(q)].array()).sum();
      G(q, p) = G(p, q);
    }
  return G;
}

Matrix weighted_gram(const std::vector<Matrix>& X, const Matrix& A) {
  const Index P = static_cast<Index>(X.size());
  std::vector<Matrix> AX;
  for (const auto& x : X) AX.push_back(A * x);
  Matrix G(P, P);
  for (Index p = 0; p < P; ++p)
    for (Index q = 0; q < P; ++q)
      G(p, q) = (X[static_cast<std::size_t>(p)].array() * AX[static_cast<std::size_t>(q)].array()).sum();
  return 0.5 * (G + G.transpose());
}

Vector pooled_cross(const std::vector<Matrix>& X, const Matrix& Y) {
  Vector c(static_cast<Index>(X.size()));
  for (std::size_t p = 0; p < X.size(); ++p) c(static_cast<Index>(p)) = (X[p].array() * Y.array()).sum();
  return c;
}

Vector weighted_cross(const std::vector<Matrix>& X, const Matrix& A, const Matrix& Y) {
  const Matrix AY = A * Y;
  return pooled_cross(X, AY);
}

Matrix residual_panel(const Matrix& Y, const std::vector<Matrix>& X, const Vector& beta) {
  Matrix R = Y;
  for (std::size_t p = 0; p < X.size(); ++p) R -= beta(static_cast<Index>(p)) * X[p];
  return R;
}

namespace {

Eigen::LDLT<Matrix> checked_ldlt(const Matrix& A, const char* what) {
  Eigen::LDLT<Matrix> ldlt(A);
  const double scale = A.size() > 0 ? A.diagonal().cwiseAbs().maxCoeff() : 0.0;
  if (ldlt.info() != Eigen::Success || !(scale > 0.0) || (ldlt.vectorD().array() <= 1e-12 * scale).any())
    throw Error(ErrorCode::SingularDesign, std::string(what) + ": matrix is singular");
  return ldlt;
}

}  // namespace

Vector solve_spd(const Matrix& A, const Vector& b, const char* what) { return checked_ldlt(A, what).solve(b); }

Matrix inverse_spd(const Matrix& A, const char* what) {
  return checked_ldlt(A, what).solve(Matrix::Identity(A.rows(), A.cols()));
}

std::vector<CoefficientRow> coefficient_rows(const std::vector<std::string>& names, const Vector& estimate,
                                             const Vector& se) {
  std::vector<CoefficientRow> rows;
  for (Index j = 0; j < estimate.size(); ++j) {
    CoefficientRow r;
    r.name = names.at(static_cast<std::size_t>(j));
    r.estimate = estimate(j);
    r.se = se(j);
    r.z = r.estimate / r.se;
    r.p = std::isfinite(r.z) ? stats::normal_two_sided_p(r.z) : (r.estimate != 0.0 ? 0.0 : 1.0);
    rows.push_back(r);
  }
  return rows;
}

Vector residual_quantiles(const Matrix& residuals) {
  std::vector<double> v(residuals.data(), residuals.data() + residuals.size());
  Vector q = Vector::Zero(5);
  if (v.empty()) return q;
  std::sort(v.begin(), v.end());
  const double probs[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int k = 0; k < 5; ++k) {
    const double h = probs[k] * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    q(k) = v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  }
  return q;
}

}  // namespace pf
