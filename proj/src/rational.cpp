#include "idsbench/rational.hpp"

#include "idsbench/error.hpp"

#include <charconv>
#include <cstdlib>

namespace idsbench {
namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
    throw ParseError("invalid number '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw ParseError("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash), text), den);
  }
  bool negative = text.front() == '-';
  std::string_view body = negative ? text.substr(1) : text;
  auto dot = body.find('.');
  std::string_view int_part = body.substr(0, dot);
  std::string_view frac_part =
      dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
  if (int_part.empty() && frac_part.empty()) throw ParseError("invalid number '" + std::string(text) + "'");
  if (frac_part.size() > 15) throw ParseError("too many decimals in '" + std::string(text) + "'");
  std::int64_t whole = int_part.empty() ? 0 : parse_int(int_part, text);
  std::int64_t scale = 1;
  std::int64_t frac = 0;
  if (!frac_part.empty()) {
    frac = parse_int(frac_part, text);
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
  }
  Rational r = Rational(whole) + Rational(frac, scale);
  return negative ? -r : r;
}

std::string to_decimal(const Rational& r, int digits) {
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  bool negative = r < 0;
  Rational a = negative ? -r : r;
  // round half up on the scaled magnitude
  __int128 scaled = static_cast<__int128>(a.numerator()) * scale;
  __int128 q = scaled / a.denominator();
  __int128 rem = scaled % a.denominator();
  if (2 * rem >= a.denominator()) ++q;
  auto whole = static_cast<std::int64_t>(q / scale);
  auto frac = static_cast<std::int64_t>(q % scale);
  std::string out = (negative && q != 0 ? "-" : "") + std::to_string(whole);
  if (digits > 0) {
    std::string f = std::to_string(frac);
    out += '.' + std::string(digits - f.size(), '0') + f;
  }
  return out;
}

std::string to_exact_string(const Rational& r) {
  std::int64_t den = r.denominator();
  int twos = 0, fives = 0;
  while (den % 2 == 0) den /= 2, ++twos;
  while (den % 5 == 0) den /= 5, ++fives;
  if (den != 1) return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
  int digits = std::max(twos, fives);
  std::string s = to_decimal(r, digits);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

}  // namespace idsbench
