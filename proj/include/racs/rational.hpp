#ifndef RACS_RATIONAL_HPP
#define RACS_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "racs/error.hpp"

namespace racs {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

/// Converts an exact rational to a binary floating type. The result is within
/// one unit in the last place of the exact value: 64 significant bits of the
/// quotient are formed with integer division, then rounded once by the
/// hardware conversion.
template <class Float>
Float rational_to_float(const Rational& r) {
  static_assert(std::numeric_limits<Float>::digits <= 64);
  BigInt num = numerator_of(r);
  const BigInt den = denominator_of(r);
  if (num == 0) return Float{0};
  const bool negative = num < 0;
  if (negative) num = -num;
  const long a = static_cast<long>(boost::multiprecision::msb(num));
  const long b = static_cast<long>(boost::multiprecision::msb(den));
  const long shift = 63 - (a - b);
  BigInt q;
  if (shift >= 0) {
    q = (num << static_cast<unsigned>(shift)) / den;
  } else {
    q = num / (den << static_cast<unsigned>(-shift));
  }
  const auto bits = q.convert_to<std::uint64_t>();
  Float out = std::ldexp(static_cast<Float>(bits), static_cast<int>(-shift));
  return negative ? -out : out;
}

inline double to_double(const Rational& r) { return rational_to_float<double>(r); }
inline long double to_long_double(const Rational& r) { return rational_to_float<long double>(r); }

inline std::string to_string(const Rational& r) { return r.str(); }

/// Exact power by repeated squaring.
inline Rational pow(const Rational& base, std::uint64_t exponent) {
  Rational result{1};
  Rational b = base;
  while (exponent != 0) {
    if (exponent & 1U) result *= b;
    exponent >>= 1U;
    if (exponent != 0) b *= b;
  }
  return result;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline BigInt parse_integer(std::string_view digits) {
  BigInt v{0};
  for (char c : digits) v = v * 10 + (c - '0');
  return v;
}

inline BigInt pow10(std::uint32_t e) {
  BigInt v{1};
  for (std::uint32_t k = 0; k < e; ++k) v *= 10;
  return v;
}

}  // namespace detail

/// Parses "a/b", an integer, or a finite decimal ("0.25", ".5", "2.5e-3") into
/// an exact rational. Decimals are read as a/10^d, never through binary floats.
inline Rational parse_rational(std::string_view text) {
  using detail::all_digits;
  std::string_view s = detail::trim(text);
  const std::string original{text};
  if (s.empty()) throw ValidationError("empty number");

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto lhs = detail::trim(s.substr(0, slash));
    auto rhs = detail::trim(s.substr(slash + 1));
    if (!all_digits(lhs) || !all_digits(rhs)) throw ValidationError("malformed fraction '" + original + "'");
    BigInt den = detail::parse_integer(rhs);
    if (den == 0) throw ValidationError("zero denominator in '" + original + "'");
    Rational r{detail::parse_integer(lhs), den};
    return negative ? Rational{-r} : r;
  }

  std::int64_t exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) throw ValidationError("malformed exponent in '" + original + "'");
    exponent = std::stoll(std::string{exp_part});
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }

  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) throw ValidationError("malformed number '" + original + "'");
  if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part))) {
    throw ValidationError("malformed number '" + original + "'");
  }

  std::string digits{int_part};
  digits += frac_part;
  BigInt num = detail::parse_integer(digits);
  std::int64_t scale = static_cast<std::int64_t>(frac_part.size()) - exponent;
  Rational r;
  if (scale >= 0) {
    r = Rational{num, detail::pow10(static_cast<std::uint32_t>(scale))};
  } else {
    r = Rational{num * detail::pow10(static_cast<std::uint32_t>(-scale))};
  }
  return negative ? Rational{-r} : r;
}

}  // namespace racs

#endif  // RACS_RATIONAL_HPP
