#include "roundtax/money.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace roundtax {

std::string Money::to_string() const {
  const std::int64_t magnitude = agorot_ < 0 ? -agorot_ : agorot_;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", agorot_ < 0 ? "-" : "",
                static_cast<long long>(magnitude / 100), static_cast<long long>(magnitude % 100));
  return buf;
}

Money parse_money(std::string_view text) {
  const auto fail = [&] {
    throw std::invalid_argument("not a money amount: '" + std::string(text) + "'");
  };
  if (text.empty()) fail();
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) fail();
  if (frac.size() > 2) fail();

  std::int64_t nis = 0;
  if (!whole.empty()) {
    auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), nis);
    if (ec != std::errc{} || p != whole.data() + whole.size()) fail();
  }
  std::int64_t agorot = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    agorot *= 10;
    if (i < frac.size()) {
      if (frac[i] < '0' || frac[i] > '9') fail();
      agorot += frac[i] - '0';
    }
  }
  const std::int64_t total = nis * 100 + agorot;
  return Money(negative ? -total : total);
}

Money round_bill(Money amount, RoundingRegime regime) {
  return amount + rounding_delta(amount, regime);
}

Money rounding_delta(Money amount, RoundingRegime regime) {
  if (amount.agorot() < 0) {
    throw std::domain_error("cannot round a negative bill: " + amount.to_string());
  }
  const int residue = static_cast<int>(amount.agorot() % granularity(regime));
  return Money(residue_delta(residue, regime));
}

std::string_view to_string(RoundingRegime regime) {
  switch (regime) {
    case RoundingRegime::Nearest5: return "nearest5";
    case RoundingRegime::Nearest10: return "nearest10";
    case RoundingRegime::None: return "none";
  }
  return "none";
}

RoundingRegime parse_regime(std::string_view name) {
  if (name == "nearest5") return RoundingRegime::Nearest5;
  if (name == "nearest10") return RoundingRegime::Nearest10;
  if (name == "none") return RoundingRegime::None;
  throw std::invalid_argument("unknown rounding regime '" + std::string(name) +
                              "' (expected nearest5, nearest10 or none)");
}

}  // namespace roundtax
