// SPDX-License-Identifier: MIT
/**
 * @file oracle_panels.hpp
 * @brief Closed-form deterministic panels. Reference values frozen in the unit
 *        tests were computed from these exact formulas by an independent
 *        NumPy implementation (dense eigendecompositions, no shared code).
 */
#pragma once

#include "panelfactor/panel.hpp"

#include <cmath>
#include <numbers>

namespace pf::testing {

/// Hash-style pseudo noise in [-0.5, 0.5): frac(sin(12.9898 t + 78.233 i) * 43758.5453) - 0.5, t,i 1-based.
inline Matrix hash_noise(Index T, Index n) {
  Matrix E(T, n);
  for (Index i = 0; i < n; ++i)
    for (Index t = 0; t < T; ++t) {
      const double v = std::sin(12.9898 * static_cast<double>(t + 1) + 78.233 * static_cast<double>(i + 1)) * 43758.5453;
      E(t, i) = v - std::floor(v) - 0.5;
    }
  return E;
}

/// Three smooth factors with trigonometric loadings plus 0.3 * hash noise.
inline Matrix smooth_factor_panel(Index T, Index n) {
  Matrix W(T, n);
  const double pi = std::numbers::pi;
  for (Index i = 0; i < n; ++i)
    for (Index t = 0; t < T; ++t) {
      const double s = static_cast<double>(t) / static_cast<double>(T);
      const double x = static_cast<double>(i);
      const double f1 = std::sin(2.0 * pi * s), f2 = std::cos(pi * s) + s, f3 = (s - 0.5) * (s - 0.5);
      const double l1 = 1.0 + 0.5 * std::cos(x), l2 = std::sin(0.7 * x + 0.3), l3 = 0.5 * std::cos(1.9 * x);
      W(t, i) = 2.0 * f1 * l1 + 1.5 * f2 * l2 + f3 * l3;
    }
  return W + 0.3 * hash_noise(T, n);
}

}  // namespace pf::testing
