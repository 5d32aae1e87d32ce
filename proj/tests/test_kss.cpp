// SPDX-License-Identifier: MIT
#include "doctest.h"
#include "cigar_fixture.hpp"
#include "simulate.hpp"

#include "panelfactor/errors.hpp"
#include "panelfactor/kss.hpp"
#include "panelfactor/spline.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace pf;
using pf::testing::cigar;

namespace {

/// y = 0.8 x + smooth factors + noise; x itself loads on a rough component.
PanelSet smooth_factor_regression(std::uint64_t seed, Index T = 40, Index n = 30) {
  pf::testing::Rng rng(seed);
  Matrix F(T, 2);
  for (Index t = 0; t < T; ++t) {
    const double s = static_cast<double>(t) / static_cast<double>(T);
    F(t, 0) = std::sin(2.0 * std::numbers::pi * s);
    F(t, 1) = std::cos(std::numbers::pi * s);
  }
  const Matrix L = rng.normal(n, 2);
  const Matrix X = rng.normal(T, n) + 0.5 * F * rng.normal(n, 2).transpose();
  const Matrix Y = 0.8 * X + F * L.transpose() + 0.2 * rng.normal(T, n);
  return pf::testing::make_set(Y, {X}, false);
}

}  // namespace

TEST_CASE("slope at infinite smoothing is OLS on detrended data") {
  PanelSet data = smooth_factor_regression(3);
  Design ds = prepare_design(data, Effects::None);
  const Index T = ds.T();
  // [TRIVIAL] Z_inf projects onto constants and linear trends, so I - Z_inf is the detrending projector.
  SplineSystem sys(T);
  const Matrix Q = Matrix::Identity(T, T) - sys.smoother_matrix(std::numeric_limits<double>::infinity());
  const double b = (Q * ds.X[0]).cwiseProduct(ds.Y).sum() / (Q * ds.X[0]).cwiseProduct(ds.X[0]).sum();
  CHECK(kss_beta(ds, std::numeric_limits<double>::infinity())(0) == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("KSS recovers the slope under smooth factors") {
  KssFit fit = kss_fit(smooth_factor_regression(5));
  CHECK(fit.beta(0) == doctest::Approx(0.8).epsilon(0.05));
  CHECK(fit.d_used == 2);
  CHECK(fit.converged);
  CHECK(fit.used_dim_criterion == "KSS.C");
  CHECK(fit.factors.F.cols() == 2);
  CHECK((fit.residuals.array().isFinite()).all());
}

TEST_CASE("slopes do not depend on the intercept") {
  PanelSet a = smooth_factor_regression(7);
  PanelSet b = a;
  b.has_intercept = true;
  b.response.values.array() += 3.0;
  KssFit fa = kss_fit(a), fb = kss_fit(b);
  CHECK(fb.beta(0) == doctest::Approx(fa.beta(0)).epsilon(1e-8));
  CHECK(fb.has_intercept);
}

TEST_CASE("Cigar levels model") {
  KssFit fit = kss_fit(cigar().levels(true));
  // [DERIVED] independent fixed-point iteration (closed-form slope at fixed kappa alternated with GCV).
  CHECK(fit.kappa == doctest::Approx(0.456285).epsilon(1e-3));
  CHECK(fit.beta(0) == doctest::Approx(-0.2595).epsilon(1e-3));
  CHECK(fit.beta(1) == doctest::Approx(0.1629).epsilon(2e-3));
  CHECK(fit.intercept == doctest::Approx(4.025).epsilon(1e-3));
  CHECK(fit.d_used == 6);
  CHECK(fit.df == 1380 - 76 * 6 - 2 - 1);
  KssOptions ind;
  ind.effects = Effects::Individual;
  CHECK(kss_fit(cigar().levels(true), ind).d_used == 5);
}

TEST_CASE("fixed dimension, fixed kappa and consult table") {
  PanelSet data = smooth_factor_regression(9);
  KssOptions o;
  o.factor_dim = 1;
  o.spar = 0.5;
  KssFit fit = kss_fit(data, o);
  CHECK(fit.d_used == 1);
  CHECK(fit.kappa == 0.5);
  CHECK(fit.used_dim_criterion == "fixed");
  KssOptions bad;
  bad.consult_dim = true;
  CHECK_THROWS_AS(kss_fit(data, bad), Error);
  o.consult_dim = true;
  KssFit c = kss_fit(data, o);
  REQUIRE(c.consult.has_value());
  CHECK(c.consult->dims.size() == 16);
  KssOptions neg;
  neg.spar = -1.0;
  CHECK_THROWS_AS(kss_fit(data, neg), Error);
}

TEST_CASE("cross-validated kappa does not exceed the GCV value") {
  KssOptions o;
  o.cv = true;
  KssFit fit = kss_fit(smooth_factor_regression(11, 25, 15), o);
  CHECK(fit.kappa <= fit.kappa_gcv * (1.0 + 1e-12));
  CHECK_FALSE(fit.cv_scores.empty());
}

TEST_CASE("cascade objective is non-increasing at fixed kappa") {
  PanelSet data = smooth_factor_regression(13);
  Design ds = prepare_design(data, Effects::None);
  std::vector<double> h = kss_cascade_objective(ds, 0.5, Vector::Zero(1), 30);
  REQUIRE(h.size() >= 2);
  for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] <= h[k - 1] * (1.0 + 1e-12));
}

TEST_CASE("summary table") {
  KssFit fit = kss_fit(smooth_factor_regression(15));
  SummaryTable s = kss_summary(fit);
  REQUIRE(s.coefficients.size() == 1);
  CHECK(s.coefficients[0].se > 0.0);
  CHECK(s.residual_quantiles.size() == 5);
}
