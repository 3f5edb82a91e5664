#include "roundtax/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace roundtax {

Rational parse_decimal(std::string_view text) {
  const std::string original(text);
  const auto fail = [&] { throw std::invalid_argument("not a decimal number: '" + original + "'"); };
  if (text.empty()) fail();

  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  BigInt digits = 0;
  int scale = 0;  // value = digits * 10^-scale
  bool seen_digit = false;
  bool seen_dot = false;
  std::size_t i = 0;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      seen_digit = true;
      if (seen_dot) ++scale;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) fail();
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') fail();
    const std::string exponent(text.substr(i + 1));
    if (exponent.empty()) fail();
    std::size_t used = 0;
    int e = 0;
    try {
      e = std::stoi(exponent, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != exponent.size()) fail();
    scale -= e;
  }
  Rational value(digits);
  const BigInt ten_power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  value = scale >= 0 ? value / Rational(ten_power) : value * Rational(ten_power);
  return negative ? Rational(-value) : value;
}

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  const Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return parse_decimal(text.substr(0, slash)) / den;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

BigInt round_half_away(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  const BigInt magnitude = (2 * abs(num) + den) / (2 * den);
  return num < 0 ? BigInt(-magnitude) : magnitude;
}

std::string to_decimal_string(const Rational& value, int places) {
  const BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(places));
  const BigInt scaled = round_half_away(value * Rational(scale));
  const BigInt magnitude = abs(scaled);
  std::string digits = magnitude.str();
  if (places > 0) {
    if (digits.size() <= static_cast<std::size_t>(places)) {
      digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  }
  return scaled < 0 ? "-" + digits : digits;
}

}  // namespace roundtax
