#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace idsbench {

using Rational = boost::rational<std::int64_t>;

/// Parses "3", "2.5", "-0.125" or "7/3". Throws ParseError.
Rational parse_rational(std::string_view text);

/// Decimal rendering rounded half-up to `digits` fractional digits.
std::string to_decimal(const Rational& r, int digits = 6);

/// Shortest exact rendering: a terminating decimal when one exists, else "n/d".
std::string to_exact_string(const Rational& r);

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

}  // namespace idsbench
