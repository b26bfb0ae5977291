#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#if defined(CTRAP_HAVE_FLOAT128)
extern "C" {
#include <quadmath.h>
}
#endif

namespace ctrap::num {

// Elementary functions overloaded on every supported working precision.

inline double sqrt(double x) { return std::sqrt(x); }
inline long double sqrt(long double x) { return std::sqrt(x); }
inline double exp(double x) { return std::exp(x); }
inline long double exp(long double x) { return std::exp(x); }
inline double pow(double x, double y) { return std::pow(x, y); }
inline long double pow(long double x, long double y) { return std::pow(x, y); }
inline double cos(double x) { return std::cos(x); }
inline long double cos(long double x) { return std::cos(x); }
inline double sin(double x) { return std::sin(x); }
inline long double sin(long double x) { return std::sin(x); }
inline double abs(double x) { return std::abs(x); }
inline long double abs(long double x) { return std::abs(x); }

template <class S>
S epsilon() {
  return std::numeric_limits<S>::epsilon();
}
template <class S>
S pi() {
  return std::numbers::pi_v<S>;
}

#if defined(CTRAP_HAVE_FLOAT128)
using quad = __float128;
inline quad sqrt(quad x) { return sqrtq(x); }
inline quad exp(quad x) { return expq(x); }
inline quad pow(quad x, quad y) { return powq(x, y); }
inline quad cos(quad x) { return cosq(x); }
inline quad sin(quad x) { return sinq(x); }
inline quad abs(quad x) { return fabsq(x); }
template <>
inline quad epsilon<quad>() {
  return scalbnq(quad(1), -112);
}
template <>
inline quad pi<quad>() {
  return 4 * atanq(quad(1));
}
#endif

/// Integer power by repeated multiplication (exact for small exponents).
template <class S>
S ipow(S x, int n) {
  S r = 1;
  const bool inv = n < 0;
  for (int i = 0; i < (inv ? -n : n); ++i) r *= x;
  return inv ? S(1) / r : r;
}

}  // namespace ctrap::num
