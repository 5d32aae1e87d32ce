// SPDX-License-Identifier: MIT
#include "panelfactor/spectests.hpp"

#include "panelfactor/errors.hpp"
#include "panelfactor/inference.hpp"
#include "panelfactor/stats.hpp"

#include <cmath>

namespace pf {

std::string to_string(Decision d) { return d == Decision::Reject ? "reject" : "fail_to_reject"; }

TestResult hausman_test(const EupFit& restricted, const EupFit& unrestricted, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  const Design& r = restricted.design;
  const Design& u = unrestricted.design;
  if (r.T() != u.T() || r.n() != u.n() || r.P() != u.P() || r.names != u.names ||
      r.Y_raw.cols() != u.Y_raw.cols() || !(r.Y_raw.array() == u.Y_raw.array()).all())
    throw Error(ErrorCode::MismatchedFits, "restricted and unrestricted fits do not share data and regressors");
  if (restricted.d_used != 0) throw Error(ErrorCode::MismatchedFits, "the restricted fit must not contain factors");

  const Index T = u.T(), n = u.n(), P = u.P();
  const double nT = static_cast<double>(n) * static_cast<double>(T);
  TestResult res;
  res.test_name = "hausman";
  res.level = level;
  res.distribution = "chisq(" + std::to_string(P) + ")";
  res.critical_value = stats::chi2_quantile(1.0 - level, static_cast<double>(P));
  const Vector delta = unrestricted.beta - restricted.beta;
  if (delta.squaredNorm() == 0.0) {
    res.statistic = 0.0;
    res.p_value = 1.0;
    res.decision = Decision::FailToReject;
    return res;
  }
  const int d = unrestricted.d_used;
  const double df = nT - static_cast<double>((n + T) * d) - static_cast<double>(P) + 1.0;
  if (!(df > 0.0)) throw Error(ErrorCode::DegenerateVariance, "no residual degrees of freedom left");
  const double sig2 = unrestricted.ssr / df;
  const Matrix D0inv = inverse_spd(d0_matrix(projected_regressors(unrestricted)), "D0");
  const Matrix Sinv = inverse_spd(pooled_gram(r.X) / nT, "within regressors");
  Matrix Delta = (D0inv - Sinv) * sig2;
  Delta = 0.5 * (Delta + Delta.transpose());
  const std::string msg = "The assumptions of the test are not fulfilled: the covariance difference is not positive "
                          "definite; the true number of factors is probably greater than " + std::to_string(d);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Delta);
  if (es.eigenvalues().minCoeff() <= 0.0) throw Error(ErrorCode::NegativeStatistic, msg);
  res.statistic = nT * delta.dot(es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                                 es.eigenvectors().transpose() * delta);
  if (res.statistic < 0.0) throw Error(ErrorCode::NegativeStatistic, msg);
  res.p_value = stats::chi2_upper_tail(res.statistic, static_cast<double>(P));
  res.decision = res.statistic > res.critical_value ? Decision::Reject : Decision::FailToReject;
  return res;
}

TestResult factor_existence_test(const PanelSet& data, Effects effects, double level, std::optional<int> d_max) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  Design ds = prepare_design(data, effects);
  const Index T = ds.T(), n = ds.n(), P = ds.P();
  const int dm = d_max ? *d_max : default_d_max(T, n);
  if (dm < 0 || dm > std::min(T, n)) throw Error(ErrorCode::DimensionTooLarge, "d_max out of range");
  const Vector beta = solve_spd(pooled_gram(ds.X), pooled_cross(ds.X, ds.Y), "within regressors");
  const Matrix W = residual_panel(ds.Y, ds.X, beta);
  const double df = static_cast<double>(n) * static_cast<double>(T) - static_cast<double>((n + T) * dm) -
                    static_cast<double>(P) + 1.0;
  if (!(df > 0.0)) throw Error(ErrorCode::DegenerateVariance, "d_max exhausts the residual degrees of freedom");
  const EigenDecomposition eig = symmetric_eigen(W * W.transpose());
  const double sig2 = eig.values.tail(eig.values.size() - dm).sum() / df;
  if (!(sig2 > 0.0)) throw Error(ErrorCode::DegenerateVariance, "residual variance estimate is not positive");
  const double dn = static_cast<double>(n), dT = static_cast<double>(T);
  TestResult res;
  res.test_name = "factor-existence";
  res.level = level;
  res.distribution = "normal";
  res.statistic = (W.squaredNorm() - (dn - 1.0) * (dT - 1.0) * sig2) / (std::sqrt(2.0 * dn) * (dT - 1.0) * sig2);
  res.critical_value = stats::normal_quantile(1.0 - level);
  res.p_value = stats::normal_upper_tail(res.statistic);
  res.decision = res.statistic > res.critical_value ? Decision::Reject : Decision::FailToReject;
  return res;
}

}  // namespace pf
