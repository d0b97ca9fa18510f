#include "pop/rational.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <system_error>

namespace pop {

namespace {

std::int64_t checked_pow10(int exponent) {
  if (exponent < 0 || exponent > 18) {
    throw std::invalid_argument("decimal exponent out of range");
  }
  std::int64_t result = 1;
  for (int i = 0; i < exponent; ++i) result *= 10;
  return result;
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

Rational parse_decimal(std::string_view text) {
  int exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    exponent = static_cast<int>(parse_int(text.substr(e + 1)));
    text = text.substr(0, e);
  }
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  std::string digits;
  int fraction_digits = 0;
  bool seen_point = false;
  for (char ch : text) {
    if (ch == '.') {
      if (seen_point) throw std::invalid_argument("malformed decimal");
      seen_point = true;
    } else if (ch >= '0' && ch <= '9') {
      digits.push_back(ch);
      if (seen_point) ++fraction_digits;
    } else {
      throw std::invalid_argument("malformed decimal: '" + std::string(text) + "'");
    }
  }
  if (digits.empty()) throw std::invalid_argument("malformed decimal");
  // strip trailing zeros of the fraction so that "0.350000000" stays small
  while (fraction_digits > 0 && digits.size() > 1 && digits.back() == '0') {
    digits.pop_back();
    --fraction_digits;
  }
  std::int64_t mantissa = parse_int(digits);
  if (negative) mantissa = -mantissa;
  int scale = exponent - fraction_digits;
  if (scale >= 0) return Rational(mantissa * checked_pow10(scale));
  return Rational(mantissa, checked_pow10(-scale));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t num = parse_int(text.substr(0, slash));
    std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
  }
  return parse_decimal(text);
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite number");
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::invalid_argument("cannot format number");
  return parse_decimal(std::string_view(buffer, static_cast<std::size_t>(ptr - buffer)));
}

std::string to_string(const Rational& value) {
  std::int64_t den = value.denominator();
  std::int64_t reduced = den;
  int twos = 0, fives = 0;
  while (reduced % 2 == 0) { reduced /= 2; ++twos; }
  while (reduced % 5 == 0) { reduced /= 5; ++fives; }
  if (reduced != 1) {
    return std::to_string(value.numerator()) + "/" + std::to_string(den);
  }
  if (den == 1) return std::to_string(value.numerator());
  return to_fixed(value, std::max(twos, fives));
}

std::string to_fixed(const Rational& value, int decimals) {
  std::int64_t scale = checked_pow10(decimals);
  std::int64_t num = value.numerator();
  std::int64_t den = value.denominator();
  bool negative = num < 0;
  __int128 scaled = static_cast<__int128>(negative ? -num : num) * scale;
  __int128 q = scaled / den;
  __int128 r = scaled % den;
  if (2 * r >= den) ++q;
  auto whole = static_cast<std::int64_t>(q / scale);
  auto frac = static_cast<std::int64_t>(q % scale);
  std::string out = (negative && q != 0 ? "-" : "") + std::to_string(whole);
  if (decimals > 0) {
    std::string f = std::to_string(frac);
    out += "." + std::string(static_cast<std::size_t>(decimals) - f.size(), '0') + f;
  }
  return out;
}

double to_double(const Rational& value) {
  return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

std::int64_t common_denominator(const std::vector<Rational>& values) {
  std::int64_t lcm = 1;
  for (const auto& v : values) lcm = std::lcm(lcm, v.denominator());
  return lcm;
}

Rational rational_gcd(const std::vector<Rational>& values) {
  std::int64_t den = common_denominator(values);
  std::int64_t g = 0;
  for (const auto& v : values) {
    g = std::gcd(g, (v * den).numerator());
  }
  return Rational(g, den);
}

}  // namespace pop
