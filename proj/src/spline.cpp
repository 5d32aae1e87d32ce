// SPDX-License-Identifier: MIT
#include "panelfactor/spline.hpp"

#include "panelfactor/errors.hpp"

#include <cmath>
#include <limits>

namespace pf {

SplineSystem::SplineSystem(Index T) : T_(T) {
  if (T < 4) throw Error(ErrorCode::TooShort, "spline system needs T >= 4");
  // Second-difference operator Q (T x (T-2)) and tridiagonal Gram matrix Rm
  // for unit knot spacing: R = Q Rm^{-1} Q'.
  const Index k = T - 2;
  Matrix Q = Matrix::Zero(T, k);
  Matrix Rm = Matrix::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    Q(j, j) = 1.0;
    Q(j + 1, j) = -2.0;
    Q(j + 2, j) = 1.0;
    Rm(j, j) = 2.0 / 3.0;
    if (j + 1 < k) {
      Rm(j, j + 1) = 1.0 / 6.0;
      Rm(j + 1, j) = 1.0 / 6.0;
    }
  }
  R_ = Q * Rm.llt().solve(Q.transpose());
  R_ = 0.5 * (R_ + R_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(R_);
  s_ = es.eigenvalues();
  U_ = es.eigenvectors();
  // The null space {1, t} is known exactly; remove round-off there.
  s_(0) = 0.0;
  s_(1) = 0.0;
  for (Index j = 2; j < T; ++j) s_(j) = std::max(s_(j), 0.0);
}

Vector SplineSystem::smoother_eigenvalues(double kappa) const {
  if (kappa < 0) throw Error(ErrorCode::NegativeKappa, "kappa must be nonnegative");
  // kappa = +inf is the limit onto the linear null space {1, t}.
  if (std::isinf(kappa)) return (s_.array() == 0.0).cast<double>().matrix();
  return (1.0 + kappa * s_.array()).inverse().matrix();
}

Matrix SplineSystem::smoother_matrix(double kappa) const {
  Vector h = smoother_eigenvalues(kappa);
  Matrix Z = U_ * h.asDiagonal() * U_.transpose();
  return 0.5 * (Z + Z.transpose());
}

Smoother SplineSystem::smoother(double kappa) const {
  Smoother s;
  s.kappa = kappa;
  s.Z_kappa = smoother_matrix(kappa);
  s.trace = trace(kappa);
  return s;
}

double SplineSystem::trace(double kappa) const { return smoother_eigenvalues(kappa).sum(); }

double SplineSystem::gcv_from_energy(double kappa, const Vector& energy, double n) const {
  double num = 0.0, tr = 0.0;
  for (Index j = 0; j < T_; ++j) {
    double r = kappa * s_(j) / (1.0 + kappa * s_(j));
    num += r * r * energy(j);
    tr += r;
  }
  if (tr <= 0.0) return std::numeric_limits<double>::infinity();
  return num / ((n / static_cast<double>(T_)) * tr * tr);
}

double SplineSystem::gcv(double kappa, const Matrix& W) const {
  if (kappa < 0) throw Error(ErrorCode::NegativeKappa, "kappa must be nonnegative");
  if (W.rows() != T_) throw Error(ErrorCode::ShapeMismatch, "residual panel has wrong number of rows");
  Vector energy = (U_.transpose() * W).rowwise().squaredNorm();
  return gcv_from_energy(kappa, energy, static_cast<double>(W.cols()));
}

Vector SplineSystem::kappa_grid() const {
  const double scale = s_.sum() / static_cast<double>(T_);
  Vector grid(64);
  for (Index i = 0; i < 64; ++i) grid(i) = std::pow(10.0, -8.0 + 16.0 * static_cast<double>(i) / 63.0) / scale;
  return grid;
}

GcvResult SplineSystem::gcv_select(const Matrix& W) const {
  if (W.rows() != T_) throw Error(ErrorCode::ShapeMismatch, "residual panel has wrong number of rows");
  GcvResult res;
  if (W.cwiseAbs().maxCoeff() == 0.0) {
    res.kappa = std::numeric_limits<double>::infinity();
    res.score = 0.0;
    res.degenerate = true;
    return res;
  }
  const Vector energy = (U_.transpose() * W).rowwise().squaredNorm();
  const double n = static_cast<double>(W.cols());
  const Vector grid = kappa_grid();
  Index best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < grid.size(); ++i) {
    double v = gcv_from_energy(grid(i), energy, n);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  // Golden-section refinement in log(kappa) on the bracketing grid cell.
  double lo = std::log(grid(std::max<Index>(best - 1, 0)));
  double hi = std::log(grid(std::min<Index>(best + 1, grid.size() - 1)));
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double lk) { return gcv_from_energy(std::exp(lk), energy, n); };
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  // Relative width 1e-4 in kappa corresponds to an absolute width 1e-4 in log(kappa).
  while (b - a > 1e-6) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  double lk = 0.5 * (a + b);
  double val = f(lk);
  if (val <= best_val) {
    res.kappa = std::exp(lk);
    res.score = val;
  } else {
    res.kappa = grid(best);
    res.score = best_val;
  }
  return res;
}

}  // namespace pf
