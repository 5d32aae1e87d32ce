// SPDX-License-Identifier: MIT
/**
 * @file simulate.hpp
 * @brief Seeded data-generating processes shared by the unit, property and
 *        acceptance tests.
 */
#pragma once

#include "panelfactor/panel.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace pf::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double normal() { return dist_(eng_); }
  Matrix normal(Index r, Index c) {
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }
  Vector normal_vec(Index k) { return normal(k, 1); }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

inline PanelSet make_set(const Matrix& Y, const std::vector<Matrix>& X, bool intercept = false) {
  PanelSet s;
  s.response = PanelMatrix::from_values(Y);
  for (std::size_t p = 0; p < X.size(); ++p) {
    s.regressor_names.push_back("x" + std::to_string(p + 1));
    s.regressors.push_back(PanelMatrix::from_values(X[p]));
  }
  s.has_intercept = intercept;
  return s;
}

/// Exact rank-d panel F Lambda' with Gaussian factors and loadings (plus optional noise).
inline Matrix low_rank_panel(Rng& rng, Index T, Index n, int d, double noise = 0.0) {
  Matrix W = rng.normal(T, d) * rng.normal(n, d).transpose();
  if (noise > 0.0) W += noise * rng.normal(T, n);
  return W;
}

/// Null of the factor-existence test: additive effects and i.i.d. noise only.
inline PanelSet additive_null_panel(std::uint64_t seed, Index n, Index T) {
  Rng rng(seed);
  const Vector a = rng.normal_vec(n), b = rng.normal_vec(T);
  Matrix X = rng.normal(T, n);
  X.rowwise() += a.transpose();
  Matrix Y = 2.0 * X;
  Y.rowwise() += a.transpose();
  Y.colwise() += b;
  Y += rng.normal(T, n);
  return make_set(Y, {X}, true);
}

/// Interactive-effects panel with heteroskedasticity tied to the factor structure.
struct BiasPanel {
  PanelSet data;
  Vector beta0;
};

inline BiasPanel heteroskedastic_factor_panel(std::uint64_t seed, Index n = 100, Index T = 100, double c = 1.5,
                                              double tc = 1.5) {
  Rng rng(seed);
  const Matrix F = rng.normal(T, 2), L = rng.normal(n, 2);
  const Vector g = rng.normal_vec(n);
  Matrix X1 = F.col(0) * g.transpose() + rng.normal(T, n);
  Matrix X2 = F.col(1) * L.col(0).transpose() + rng.normal(T, n);
  Vector si = (c * g.array() * L.col(0).array() / 2.0).exp().matrix();
  si /= std::sqrt(si.squaredNorm() / static_cast<double>(n));
  Vector st = (tc * F.col(0).array() / 2.0).exp().matrix();
  st /= std::sqrt(st.squaredNorm() / static_cast<double>(T));
  Matrix E = rng.normal(T, n);
  E = (st * si.transpose()).cwiseProduct(E);
  Matrix Y = 1.0 * X1 + 3.0 * X2 + F * L.transpose() + E;
  return {make_set(Y, {X1, X2}), (Vector(2) << 1.0, 3.0).finished()};
}

}  // namespace pf::testing
