#pragma once

// Reference values computed without the library: Hermite functions from
// Boost's polynomial recurrence, integrals by adaptive Gauss-Kronrod.

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/hermite.hpp>

namespace oracle {

inline double hermite_function(unsigned n, double x, double m = 0.5, double w = 1.0, double hbar = 1.0) {
  const double s = std::sqrt(m * w / hbar);
  const double xi = s * x;
  const double pref = std::pow(m * w / (std::numbers::pi * hbar), 0.25) /
                      std::sqrt(std::ldexp(boost::math::factorial<double>(n), static_cast<int>(n)));
  return pref * boost::math::hermite(n, xi) * std::exp(-0.5 * xi * xi);
}

template <class F>
double integrate(F f, double lo, double hi) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13, &err);
}

} // namespace oracle
