#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace hyperlab {

/// Exact rationals for measures, step-function coefficients and KMS values.
/// Denominators stay products of small powers of (2k-1) and 2k at desk scale,
/// far inside 64-bit range.
using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// base^exponent for a possibly negative integer exponent.
inline Rational rational_power(std::int64_t base, std::int64_t exponent) {
  Rational result{1};
  const Rational factor = exponent >= 0 ? Rational{base} : Rational{1, base};
  for (std::int64_t i = 0; i < (exponent >= 0 ? exponent : -exponent); ++i) result *= factor;
  return result;
}

inline Rational rational_power(Rational base, std::int64_t exponent) {
  Rational result{1};
  const Rational factor = exponent >= 0 ? base : Rational{1} / base;
  for (std::int64_t i = 0; i < (exponent >= 0 ? exponent : -exponent); ++i) result *= factor;
  return result;
}

}  // namespace hyperlab
