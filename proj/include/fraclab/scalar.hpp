#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "fraclab/rational.hpp"

namespace fraclab {

/// Per-scalar comparison policy for the exponent algebra. Rational scalars
/// compare exactly; double scalars get a relative slack of 1e-12 so that
/// algebraic equalities survive round-off.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static constexpr bool exact = false;
  static double slack(double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }
  static double to_double(double x) { return x; }
  static std::int64_t ceil(double x) { return static_cast<std::int64_t>(std::ceil(x - 1e-12)); }
  static bool is_odd_integer(double x) {
    const double r = std::round(x);
    return std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x)) &&
           static_cast<std::int64_t>(r) % 2 != 0;
  }
  static std::string str(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
  }
};

template <>
struct ScalarOps<Rational> {
  static constexpr bool exact = true;
  static Rational slack(const Rational&, const Rational&) { return Rational(0); }
  static double to_double(const Rational& x) { return x.to_double(); }
  static std::int64_t ceil(const Rational& x) { return x.ceil(); }
  static bool is_odd_integer(const Rational& x) { return x.is_integer() && x.num() % 2 != 0; }
  static std::string str(const Rational& x) { return x.str(); }
};

template <class S>
bool approx_lt(const S& a, const S& b) {
  return a < b - ScalarOps<S>::slack(a, b);
}
template <class S>
bool approx_le(const S& a, const S& b) {
  return a <= b + ScalarOps<S>::slack(a, b);
}
template <class S>
bool approx_eq(const S& a, const S& b) {
  return approx_le(a, b) && approx_le(b, a);
}

}  // namespace fraclab
