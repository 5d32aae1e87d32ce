// SPDX-License-Identifier: MIT
#include "doctest.h"
#include "oracle_panels.hpp"
#include "properties.hpp"

#include "panelfactor/spline.hpp"

#include <limits>

using namespace pf;

TEST_CASE("cubic spline roughness penalty") {
  SplineSystem sys(5);
  const Matrix& R = sys.penalty();
  // [DERIVED] R = Q Rm^{-1} Q' for unit spacing, T = 5: R_11 = 45/28, R_33 = 96/7, R_12 = -51/14.
  CHECK(R(0, 0) == doctest::Approx(45.0 / 28.0).epsilon(1e-12));
  CHECK(R(2, 2) == doctest::Approx(96.0 / 7.0).epsilon(1e-12));
  CHECK(R(0, 1) == doctest::Approx(-51.0 / 14.0).epsilon(1e-12));
  CHECK((R - R.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  // [TRIVIAL] constants and linear trends are not penalised.
  Vector one = Vector::Ones(5), lin = Vector::LinSpaced(5, 0.0, 4.0);
  CHECK((R * one).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((R * lin).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sys.basis().isIdentity());
}

TEST_CASE("smoother trace") {
  SplineSystem sys(8);
  // [DERIVED] tr Z_1 for T = 8.
  CHECK(sys.trace(1.0) == doctest::Approx(3.7325492961996618).epsilon(1e-12));
  CHECK(sys.smoother_matrix(1.0).trace() == doctest::Approx(3.7325492961996618).epsilon(1e-12));
  // [TRIVIAL] trace decreases in kappa.
  CHECK(sys.trace(0.1) > sys.trace(1.0));
  CHECK(sys.trace(10.0) < sys.trace(1.0));
}

TEST_CASE("property: smoother trace limits") {
  auto c = pf::testing::smoother_trace_limits();
  INFO(c.detail);
  CHECK(c.ok);
  SplineSystem sys(6);
  CHECK(sys.trace(std::numeric_limits<double>::infinity()) == doctest::Approx(2.0));
}

TEST_CASE("GCV score and selection") {
  const Matrix W8 = pf::testing::smooth_factor_panel(8, 6);
  SplineSystem s8(8);
  // [DERIVED] GCV(1) on the 8 x 6 closed-form panel.
  CHECK(s8.gcv(1.0, W8) == doctest::Approx(0.67461592383342828).epsilon(1e-10));
  const Matrix W30 = pf::testing::smooth_factor_panel(30, 20);
  SplineSystem s30(30);
  GcvResult g = s30.gcv_select(W30);
  // [DERIVED] GCV minimiser on the 30 x 20 panel (golden-section tolerance 1e-4 in log kappa).
  CHECK_FALSE(g.degenerate);
  CHECK(g.kappa == doctest::Approx(2.1614902793964483).epsilon(1e-3));
  CHECK(g.score <= s30.gcv(g.kappa * 1.05, W30));
  CHECK(g.score <= s30.gcv(g.kappa / 1.05, W30));
}

TEST_CASE("GCV on an identically zero panel is degenerate") {
  SplineSystem sys(10);
  GcvResult g = sys.gcv_select(Matrix::Zero(10, 4));
  CHECK(g.degenerate);
}
