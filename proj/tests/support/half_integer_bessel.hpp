// Elementary closed forms of J and Y at orders 1/2, 3/2, 5/2, in long double
// so that the small-x cancellation in the 5/2 forms does not pollute the
// reference.

#pragma once

#include <cmath>
#include <numbers>

namespace sphdiff::testing {

inline double j_half(int twice_nu, double xd) {
  const long double x = xd;
  const long double a = std::sqrt(2.0L / (std::numbers::pi_v<long double> * x));
  const long double s = std::sin(x), c = std::cos(x);
  switch (twice_nu) {
    case 1: return static_cast<double>(a * s);
    case 3: return static_cast<double>(a * (s / x - c));
    case 5: return static_cast<double>(a * ((3.0L / (x * x) - 1.0L) * s - 3.0L * c / x));
  }
  return NAN;
}

inline double y_half(int twice_nu, double xd) {
  const long double x = xd;
  const long double a = std::sqrt(2.0L / (std::numbers::pi_v<long double> * x));
  const long double s = std::sin(x), c = std::cos(x);
  switch (twice_nu) {
    case 1: return static_cast<double>(-a * c);
    case 3: return static_cast<double>(-a * (c / x + s));
    case 5: return static_cast<double>(a * ((1.0L - 3.0L / (x * x)) * c - 3.0L * s / x));
  }
  return NAN;
}

}  // namespace sphdiff::testing
