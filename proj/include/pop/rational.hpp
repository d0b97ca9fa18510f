#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

// Boost's mixed rational/integer operator== recurses forever once C++20
// rewrites it into its own reversed form. Exact non-template overloads are
// preferred by overload resolution and break the cycle.
namespace boost {
inline bool operator==(const rational<std::int64_t>& a, std::int64_t b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline bool operator==(const rational<std::int64_t>& a, int b) { return a == static_cast<std::int64_t>(b); }
inline bool operator==(std::int64_t a, const rational<std::int64_t>& b) { return b == a; }
inline bool operator==(int a, const rational<std::int64_t>& b) { return b == static_cast<std::int64_t>(a); }
}  // namespace boost

namespace pop {

/// Exact rational number used for every coefficient, probability and
/// performance value in the engine.
using Rational = boost::rational<std::int64_t>;

/// Parses "42", "-3", "0.35", "1e-2" or "7/20" exactly.
/// Throws std::invalid_argument on malformed text.
Rational parse_rational(std::string_view text);

/// Converts a double coming from a JSON number into the exact rational of
/// its shortest round-trip decimal representation (0.35 -> 7/20).
Rational rational_from_double(double value);

/// Renders a terminating fraction as a plain decimal ("0.35", "24",
/// "-1.5"); anything else as "p/q".
std::string to_string(const Rational& value);

/// Renders with a fixed number of decimals, rounding half away from zero.
std::string to_fixed(const Rational& value, int decimals);

double to_double(const Rational& value);

/// Greatest common divisor of a set of rationals: the largest g such that
/// every value is an integer multiple of g. Zero for an all-zero input.
Rational rational_gcd(const std::vector<Rational>& values);

/// Least common multiple of the denominators.
std::int64_t common_denominator(const std::vector<Rational>& values);

}  // namespace pop
