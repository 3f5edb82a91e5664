#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Core>

namespace roundtax {

/// Arbitrary-precision rational. Expression templates are off so the type
/// behaves as a plain value inside Eigen expressions.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Exact value of a decimal literal such as "0.0611", "-3", "1.5e-3".
Rational parse_decimal(std::string_view text);

/// parse_decimal, or a fraction of two decimals such as "1/3".
Rational parse_rational(std::string_view text);

double to_double(const Rational& value);

/// Nearest integer, halves rounded away from zero.
BigInt round_half_away(const Rational& value);

/// Decimal rendering rounded (half away from zero) to `places` digits.
std::string to_decimal_string(const Rational& value, int places);

}  // namespace roundtax
