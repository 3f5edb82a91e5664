#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace roundtax {

/// An exact amount of New Israeli Shekels held as integer agorot (1 NIS = 100 agorot).
///
/// Money only combines with Money or with plain counts; there is no implicit
/// conversion to or from integers, so agorot cannot be mixed with quantities by accident.
class Money {
 public:
  constexpr Money() = default;
  constexpr explicit Money(std::int64_t agorot) : agorot_(agorot) {}

  static constexpr Money from_nis(std::int64_t nis) { return Money(nis * 100); }

  constexpr std::int64_t agorot() const { return agorot_; }

  /// Agorot part of a nonnegative amount (the two rightmost digits).
  constexpr int ending() const { return static_cast<int>(agorot_ % 100); }

  /// Whole-NIS part, rounded toward negative infinity.
  constexpr std::int64_t whole_nis() const {
    return agorot_ >= 0 ? agorot_ / 100 : -((-agorot_ + 99) / 100);
  }

  double to_nis() const { return static_cast<double>(agorot_) / 100.0; }

  /// "9.42", "-0.05", "1234.00"
  std::string to_string() const;

  constexpr Money operator-() const { return Money(-agorot_); }
  constexpr Money& operator+=(Money o) { agorot_ += o.agorot_; return *this; }
  constexpr Money& operator-=(Money o) { agorot_ -= o.agorot_; return *this; }

  friend constexpr Money operator+(Money a, Money b) { return Money(a.agorot_ + b.agorot_); }
  friend constexpr Money operator-(Money a, Money b) { return Money(a.agorot_ - b.agorot_); }
  friend constexpr Money operator*(Money a, std::int64_t count) { return Money(a.agorot_ * count); }
  friend constexpr Money operator*(std::int64_t count, Money a) { return Money(a.agorot_ * count); }

  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  std::int64_t agorot_ = 0;
};

/// Parses "9.42", "12", "-0.5" into agorot. Rejects more than two decimals.
Money parse_money(std::string_view text);

/// Cash-bill rounding rules in force over time.
enum class RoundingRegime {
  Nearest5,   // 1991-2008, after the 1-agora coin was withdrawn
  Nearest10,  // 2008-2014, after the 5-agora coin was withdrawn
  None,       // card payments, or any bill after 2014
};

/// Smallest payable cash step in agorot (1 when nothing is rounded).
constexpr int granularity(RoundingRegime regime) {
  switch (regime) {
    case RoundingRegime::Nearest5: return 5;
    case RoundingRegime::Nearest10: return 10;
    case RoundingRegime::None: return 1;
  }
  return 1;
}

/// Change in agorot applied to a bill whose residue modulo granularity(regime) is `residue`.
///
/// Nearest5 rounds residues 1,2 down and 3,4 up. Nearest10 rounds 1..4 down and
/// 5..9 up, so five endings go up and only four go down.
constexpr int residue_delta(int residue, RoundingRegime regime) {
  switch (regime) {
    case RoundingRegime::Nearest5: return residue <= 2 ? -residue : 5 - residue;
    case RoundingRegime::Nearest10: return residue <= 4 ? -residue : 10 - residue;
    case RoundingRegime::None: return 0;
  }
  return 0;
}

/// Rounds a nonnegative cash bill. Throws std::domain_error on a negative amount.
Money round_bill(Money amount, RoundingRegime regime);

/// round_bill(amount) - amount; positive when the shopper pays extra.
Money rounding_delta(Money amount, RoundingRegime regime);

std::string_view to_string(RoundingRegime regime);

/// Accepts "nearest5", "nearest10", "none".
RoundingRegime parse_regime(std::string_view name);

}  // namespace roundtax
