// SPDX-License-Identifier: MIT
// Determinism of the library: repeated fits on identical input are bit-identical.
#include "doctest.h"
#include "cigar_fixture.hpp"

#include "panelfactor/panelfactor.hpp"

using namespace pf;
using pf::testing::cigar;

TEST_CASE("repeated fits are bit-identical") {
  EupOptions o;
  o.dim_criterion = Criterion::PC3;
  EupFit a = eup_fit(cigar().differences(false), o), b = eup_fit(cigar().differences(false), o);
  CHECK((a.beta.array() == b.beta.array()).all());
  CHECK((a.residuals.array() == b.residuals.array()).all());
  KssFit ka = kss_fit(cigar().levels(true)), kb = kss_fit(cigar().levels(true));
  CHECK((ka.beta.array() == kb.beta.array()).all());
  CHECK(ka.kappa == kb.kappa);
  CHECK((ka.factors.F.array() == kb.factors.F.array()).all());
  DimReport ra = opt_dim(cigar().l_consumption.values), rb = opt_dim(cigar().l_consumption.values);
  CHECK(ra.dims == rb.dims);
}
