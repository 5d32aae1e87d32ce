// SPDX-License-Identifier: MIT
#include "doctest.h"
#include "cigar_fixture.hpp"
#include "properties.hpp"

#include "panelfactor/errors.hpp"
#include "panelfactor/inference.hpp"

using namespace pf;
using pf::testing::cigar;

namespace {

const EupFit& cigar_fit() {
  static const EupFit fit = [] {
    EupOptions o;
    o.dim_criterion = Criterion::PC3;
    return eup_fit(cigar().differences(false), o);
  }();
  return fit;
}

}  // namespace

TEST_CASE("Bartlett weights and bandwidth") {
  // [TRIVIAL] L = 2 -> 1, 2/3, 1/3.
  Vector w = hac_weights(2);
  REQUIRE(w.size() == 3);
  CHECK(w(0) == 1.0);
  CHECK(w(1) == doctest::Approx(2.0 / 3.0));
  CHECK(w(2) == doctest::Approx(1.0 / 3.0));
  CHECK(default_bandwidth(29, 46) == 5);
  CHECK_THROWS_AS(hac_weights(-1), Error);
}

TEST_CASE("without factors case 1 is the classical OLS covariance") {
  pf::testing::Rng rng(21);
  const Matrix X = rng.normal(20, 15);
  const Matrix Y = 2.0 * X + rng.normal(20, 15);
  EupOptions o;
  o.factor_dim = 0;
  EupFit fit = eup_fit(pf::testing::make_set(Y, {X}), o);
  SlopeInference inf = slope_covariance(fit, {1, std::nullopt});
  // [TRIVIAL] var = sigma^2 / sum x^2 with sigma^2 = SSR / (nT - P + 1).
  const double s2 = fit.ssr / (300.0 - 1.0 + 1.0);
  CHECK(inf.se(0) == doctest::Approx(std::sqrt(s2 / X.squaredNorm())).epsilon(1e-10));
}

TEST_CASE("projected regressors are orthogonal to the factors") {
  const EupFit& fit = cigar_fit();
  const FactorStructure fs = with_restriction(fit.factors, Restriction::RestrictFactors);
  std::vector<Matrix> Z = projected_regressors(fit);
  REQUIRE(Z.size() == 2);
  for (const Matrix& z : Z) CHECK((fs.F.transpose() * z).cwiseAbs().maxCoeff() < 1e-9);
  Matrix D0 = d0_matrix(Z);
  CHECK((D0 - D0.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("every error case yields positive standard errors on Cigar") {
  const EupFit& fit = cigar_fit();
  for (int id = 1; id <= 8; ++id) {
    CAPTURE(id);
    SlopeInference inf = slope_covariance(fit, {id, std::nullopt});
    CHECK(inf.se.size() == 2);
    CHECK((inf.se.array() > 0.0).all());
    CHECK((inf.se.array() < 0.2).all());
  }
  // [DERIVED] case 1 standard errors from the independent implementation.
  SlopeInference one = slope_covariance(fit, {1, std::nullopt});
  CHECK(one.se(0) == doctest::Approx(0.0227908).epsilon(1e-4));
  CHECK(one.se(1) == doctest::Approx(0.0359778).epsilon(1e-4));
  CHECK_THROWS_AS(slope_covariance(fit, {9, std::nullopt}), Error);
}

TEST_CASE("bias correction") {
  const EupFit& fit = cigar_fit();
  SlopeInference inf = bias_correct(fit, {7, std::nullopt});
  REQUIRE(inf.beta_star.has_value());
  const double n = 46.0, T = 29.0;
  CHECK((*inf.beta_star - (fit.beta - *inf.bias_B / n - *inf.bias_C / T)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(bias_correct(fit, {1, std::nullopt}), Error);
  SummaryTable s = eup_summary(fit, inf);
  CHECK(s.coefficients[0].estimate == (*inf.beta_star)(0));
}

TEST_CASE("property: bias correction improves the slope in most samples") {
  auto c = pf::testing::bias_correction_improves();
  INFO(c.detail);
  CHECK(c.ok);
}
