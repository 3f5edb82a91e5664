#include <gtest/gtest.h>

#include <stdexcept>

#include "roundtax/money.hpp"
#include "roundtax/philox.hpp"
#include "roundtax/rational.hpp"

namespace roundtax {
namespace {

// Independent rule: nearest multiple of g with halves going up.
std::int64_t half_up(std::int64_t agorot, int g) { return (agorot + g / 2) / g * g; }

TEST(Money, ParsesAndPrints) {
  EXPECT_EQ(parse_money("9.42").agorot(), 942);
  EXPECT_EQ(parse_money("12").agorot(), 1200);
  EXPECT_EQ(parse_money("-0.5").agorot(), -50);
  EXPECT_EQ(parse_money("0.05").to_string(), "0.05");
  EXPECT_EQ(Money(-5).to_string(), "-0.05");
  EXPECT_EQ(Money(123400).to_string(), "1234.00");
  EXPECT_THROW(parse_money("1.234"), std::invalid_argument);
  EXPECT_THROW(parse_money("abc"), std::invalid_argument);
}

TEST(Money, EndingAndWholePart) {
  EXPECT_EQ(Money(999).ending(), 99);
  EXPECT_EQ(Money(999).whole_nis(), 9);
  EXPECT_EQ(Money(-1).whole_nis(), -1);
  EXPECT_EQ(Money(0).whole_nis(), 0);
}

TEST(Money, WorkedRoundingExamples) {
  EXPECT_EQ(round_bill(parse_money("9.42"), RoundingRegime::Nearest5), parse_money("9.40"));
  EXPECT_EQ(round_bill(parse_money("9.45"), RoundingRegime::Nearest5), parse_money("9.45"));
  EXPECT_EQ(round_bill(parse_money("9.48"), RoundingRegime::Nearest5), parse_money("9.50"));
  EXPECT_EQ(round_bill(parse_money("9.42"), RoundingRegime::Nearest10), parse_money("9.40"));
  EXPECT_EQ(round_bill(parse_money("9.45"), RoundingRegime::Nearest10), parse_money("9.50"));
  EXPECT_EQ(round_bill(parse_money("9.48"), RoundingRegime::Nearest10), parse_money("9.50"));
}

TEST(Money, TruthTableMatchesHalfUpRule) {
  for (RoundingRegime regime : {RoundingRegime::Nearest5, RoundingRegime::Nearest10}) {
    const int g = granularity(regime);
    for (std::int64_t a = 0; a < 2000; ++a) {
      const Money bill(a);
      EXPECT_EQ(round_bill(bill, regime).agorot(), half_up(a, g)) << a;
      EXPECT_EQ(rounding_delta(bill, regime).agorot(), half_up(a, g) - a);
      EXPECT_EQ(round_bill(bill, regime).agorot() % g, 0);
      EXPECT_LE(std::abs(rounding_delta(bill, regime).agorot()), g / 2);
    }
  }
}

TEST(Money, TenAgoraRuleIsAsymmetric) {
  int up = 0;
  int down = 0;
  for (int r = 1; r < 10; ++r) (residue_delta(r, RoundingRegime::Nearest10) > 0 ? up : down)++;
  EXPECT_EQ(up, 5);
  EXPECT_EQ(down, 4);
}

TEST(Money, NoRoundingAndErrors) {
  EXPECT_EQ(round_bill(Money(943), RoundingRegime::None), Money(943));
  EXPECT_THROW(round_bill(Money(-1), RoundingRegime::Nearest10), std::domain_error);
  EXPECT_EQ(parse_regime("nearest5"), RoundingRegime::Nearest5);
  EXPECT_EQ(to_string(RoundingRegime::Nearest10), "nearest10");
  EXPECT_THROW(parse_regime("nearest3"), std::invalid_argument);
}

TEST(Money, RoundingIsShiftInvariantByWholeSteps) {
  for (std::int64_t a = 0; a < 300; ++a) {
    for (RoundingRegime regime : {RoundingRegime::Nearest5, RoundingRegime::Nearest10}) {
      const Money step(granularity(regime));
      EXPECT_EQ(round_bill(Money(a) + step, regime), round_bill(Money(a), regime) + step);
    }
  }
}

TEST(Philox, KnownAnswers) {
  using P = Philox4x32;
  EXPECT_EQ(P::block({0, 0, 0, 0}, {0, 0}), (P::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(P::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (P::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(P::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (P::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
  CounterStream a(7, 3);
  CounterStream b(7, 3);
  CounterStream c(7, 4);
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u32();
    EXPECT_EQ(x, b.next_u32());
    same += x == c.next_u32();
  }
  EXPECT_LT(same, 3);
  CounterStream u(1, 1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.next_uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Rational, ParsesDecimalsExactly) {
  EXPECT_EQ(parse_decimal("0.0611"), Rational(611, 10000));
  EXPECT_EQ(parse_decimal("1.5e-3"), Rational(3, 2000));
  EXPECT_EQ(parse_rational("1/3"), Rational(1, 3));
  EXPECT_EQ(round_half_away(Rational(-5, 2)), BigInt(-3));
  EXPECT_EQ(round_half_away(Rational(5, 2)), BigInt(3));
  EXPECT_EQ(to_decimal_string(Rational(2, 3), 4), "0.6667");
}

}  // namespace
}  // namespace roundtax
