#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace ergolab {

/// Arbitrary precision rational, always kept canonical.
using Rational = mpq_class;

/// Serializes as "p/q" (the denominator is always present, "0/1", "1/1").
std::string to_string(const Rational& value);

/// Accepts "p/q", "p" or "-p/q". Throws Error(ConfigError) on anything else.
Rational parse_rational(std::string_view text);

inline double to_double(const Rational& value) { return value.get_d(); }

inline Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

/// p/q in canonical form (the two-argument mpq constructor does not reduce).
inline Rational ratio(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

/// 2^-exponent as an exact rational.
Rational dyadic(unsigned exponent);

}  // namespace ergolab
