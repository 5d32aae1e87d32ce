// SPDX-License-Identifier: MIT
#include "doctest.h"
#include "cigar_fixture.hpp"
#include "properties.hpp"

#include "panelfactor/errors.hpp"
#include "panelfactor/eup.hpp"

using namespace pf;
using pf::testing::cigar;

namespace {

PanelSet interactive_panel(std::uint64_t seed, Index T = 40, Index n = 50) {
  pf::testing::Rng rng(seed);
  const Matrix F = rng.normal(T, 2), L = rng.normal(n, 2);
  const Matrix X1 = rng.normal(T, n) + F * rng.normal(n, 2).transpose();
  const Matrix X2 = rng.normal(T, n);
  const Matrix Y = 1.0 * X1 - 2.0 * X2 + F * L.transpose() + 0.3 * rng.normal(T, n);
  return pf::testing::make_set(Y, {X1, X2}, false);
}

}  // namespace

TEST_CASE("zero factors reduce to pooled least squares") {
  PanelSet data = interactive_panel(1);
  EupOptions o;
  o.factor_dim = 0;
  EupFit fit = eup_fit(data, o);
  // [TRIVIAL] normal equations of the pooled regression.
  const Design& ds = fit.design;
  const Vector ols = solve_spd(pooled_gram(ds.X), pooled_cross(ds.X, ds.Y), "ols");
  CHECK((fit.beta - ols).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(fit.d_used == 0);
}

TEST_CASE("Eup recovers slopes with interactive effects") {
  EupOptions o;
  o.dim_criterion = Criterion::IC1;
  EupFit fit = eup_fit(interactive_panel(2), o);
  CHECK(fit.d_used == 2);
  CHECK(fit.beta(0) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(fit.beta(1) == doctest::Approx(-2.0).epsilon(0.03));
  CHECK(fit.converged);
  CHECK(fit.df == 40 * 50 - 90 * 2 - 2);
}

TEST_CASE("Cigar differenced model") {
  EupOptions o;
  o.dim_criterion = Criterion::PC3;
  EupFit fit = eup_fit(cigar().differences(false), o);
  // [DERIVED] independent NumPy implementation of the same double iteration.
  CHECK(fit.beta(0) == doctest::Approx(-0.31401008).epsilon(1e-6));
  CHECK(fit.beta(1) == doctest::Approx(0.15939687).epsilon(1e-5));
  CHECK(fit.d_used == 5);
  CHECK(fit.iterations == 65);
  CHECK(fit.residual_scale == doctest::Approx(0.028205594802529).epsilon(1e-8));
  CHECK(fit.r_squared == doctest::Approx(0.7032782087749).epsilon(1e-8));
  CHECK(fit.df == 957);
}

TEST_CASE("restriction choice does not change the fit") {
  PanelSet data = interactive_panel(3);
  EupOptions a, b;
  a.factor_dim = b.factor_dim = 2;
  b.restriction = Restriction::RestrictLoadings;
  EupFit fa = eup_fit(data, a), fb = eup_fit(data, b);
  CHECK((fa.beta - fb.beta).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((fa.factors.common() - fb.factors.common()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("single iteration mode and option errors") {
  PanelSet data = interactive_panel(4);
  EupOptions o;
  o.double_iteration = false;
  EupFit fit = eup_fit(data, o);
  CHECK(fit.beta(0) == doctest::Approx(1.0).epsilon(0.05));
  EupOptions bad;
  bad.dim_criterion = Criterion::ER;
  CHECK_THROWS_AS(eup_fit(data, bad), Error);
  EupOptions big;
  big.factor_dim = 200;
  CHECK_THROWS_AS(eup_fit(data, big), Error);
}

TEST_CASE("additive effects are recovered alongside factors") {
  PanelSet data = interactive_panel(5);
  data.has_intercept = true;
  data.response.values.array() += 5.0;
  EupOptions o;
  o.factor_dim = 2;
  o.effects = Effects::Twoways;
  EupFit fit = eup_fit(data, o);
  CHECK(fit.has_intercept);
  CHECK(fit.additive.alpha.size() == 50);
  CHECK(fit.additive.theta.size() == 40);
  CHECK(fit.beta(1) == doctest::Approx(-2.0).epsilon(0.05));
}

TEST_CASE("property: Eup objective is monotone across sweeps") {
  auto c = pf::testing::eup_monotonicity();
  INFO(c.detail);
  CHECK(c.ok);
}
