// SPDX-License-Identifier: MIT
#include "doctest.h"
#include "cigar_fixture.hpp"
#include "properties.hpp"

#include "panelfactor/errors.hpp"
#include "panelfactor/spectests.hpp"

using namespace pf;
using pf::testing::cigar;

TEST_CASE("Hausman test raises NegativeStatistic on Cigar with two factors") {
  EupOptions ro;
  ro.effects = Effects::Twoways;
  ro.factor_dim = 0;
  EupOptions uo;
  uo.factor_dim = 2;
  EupFit r = eup_fit(cigar().differences(false), ro);
  EupFit u = eup_fit(cigar().differences(false), uo);
  try {
    hausman_test(r, u);
    FAIL("expected NegativeStatistic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeStatistic);
    CHECK(std::string(e.what()).find("probably greater than 2") != std::string::npos);
  }
}

TEST_CASE("Hausman test under purely additive effects") {
  pf::testing::Rng rng(31);
  const Index T = 30, n = 40;
  const Matrix F = rng.normal(T, 1), L = rng.normal(n, 1);
  Matrix X = rng.normal(T, n);
  Matrix Y = 1.5 * X + 0.5 * rng.normal(T, n);
  Y.rowwise() += rng.normal_vec(n).transpose();
  Y.colwise() += rng.normal_vec(T);
  PanelSet data = pf::testing::make_set(Y, {X}, true);
  EupOptions ro;
  ro.effects = Effects::Twoways;
  ro.factor_dim = 0;
  EupOptions uo;
  uo.effects = Effects::Twoways;
  uo.factor_dim = 1;
  EupFit r = eup_fit(data, ro), u = eup_fit(data, uo);
  TestResult h = hausman_test(r, u);
  CHECK(h.statistic >= 0.0);
  CHECK(h.distribution == "chisq(1)");
  CHECK(h.critical_value == doctest::Approx(6.6348966010212145));
  // Mismatched inputs.
  PanelSet other = data;
  other.response.values(0, 0) += 1.0;
  CHECK_THROWS_AS(hausman_test(eup_fit(other, ro), u), Error);
  CHECK_THROWS_AS(hausman_test(u, u), Error);
}

TEST_CASE("factor existence test on Cigar") {
  TestResult t = factor_existence_test(cigar().differences(false), Effects::Twoways, 0.01);
  // [DERIVED] literal statistic from the independent implementation.
  CHECK(t.statistic == doctest::Approx(3.748).epsilon(1e-3));
  CHECK(t.critical_value == doctest::Approx(2.3263478740408408));
  CHECK(t.decision == Decision::Reject);
  CHECK(to_string(t.decision) == "reject");
  CHECK_THROWS_AS(factor_existence_test(cigar().differences(false), Effects::Twoways, 0.0), Error);
}

TEST_CASE("property: factor existence test holds its size") {
  auto c = pf::testing::factor_test_size();
  INFO(c.detail);
  CHECK(c.ok);
}
