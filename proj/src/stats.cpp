// SPDX-License-Identifier: MIT
#include "panelfactor/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace pf::stats {

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

double normal_upper_tail(double z) {
  return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), z));
}

double normal_two_sided_p(double z) { return 2.0 * normal_upper_tail(std::abs(z)); }

double chi2_upper_tail(double x, double k) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(k), x));
}

double chi2_quantile(double p, double k) {
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(k), p);
}

}  // namespace pf::stats
