#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roundtax/distributions.hpp"
#include "roundtax/money.hpp"
#include "roundtax/rational.hpp"

namespace roundtax {

struct GroupBy {
  bool store_type = true;
  bool year = true;
};

struct GroupKey {
  std::optional<StoreType> store_type;
  std::optional<int> year;
  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
};

std::string to_string(const GroupKey& key);

/// Counts of price mod 100 per group.
class EndingHistogram {
 public:
  using Counts = std::array<std::int64_t, 100>;

  void add(const GroupKey& key, Money price);

  const std::map<GroupKey, Counts>& groups() const { return groups_; }
  const Counts& counts(const GroupKey& key) const;
  std::int64_t total(const GroupKey& key) const;

  Rational share(const GroupKey& key, int residue) const;
  /// Share of the 10-agora segment `segment` (residues 10 s .. 10 s + 9).
  Rational segment_share(const GroupKey& key, int segment) const;

 private:
  std::map<GroupKey, Counts> groups_;
};

GroupKey group_key(const PriceObservation& obs, const GroupBy& group_by);

/// Throws std::domain_error on a negative price.
EndingHistogram ending_histogram(std::span<const PriceObservation> observations, const GroupBy& group_by);

/// Summed share over residues lo..hi. Throws std::domain_error unless 0 <= lo <= hi <= 99.
Rational share_in_range(const EndingHistogram& hist, const GroupKey& key, int lo, int hi);

/// Share of prices whose last digit is `digit` (9 gives every 9-ending price, not only 90-99).
Rational share_with_last_digit(const EndingHistogram& hist, const GroupKey& key, int digit);

/// Percent change of each 10-agora segment share from `a` to `b`; empty where a's share is 0.
std::array<std::optional<Rational>, 10> segment_change(const EndingHistogram& a, const GroupKey& key_a,
                                                       const EndingHistogram& b, const GroupKey& key_b);

struct PennyGroup {
  GroupKey key;
  Rational mean_agorot;  // average of price mod 100
  std::int64_t n_prices = 0;
};

/// Average agorot per price. `price_cap` empty means no cap.
struct PennyStats {
  std::optional<Money> price_cap;
  std::vector<PennyGroup> groups;
  std::vector<GroupKey> omitted;  // groups with no price under the cap
};

/// Mean of price mod 100 over prices strictly below the cap, per group.
PennyStats avg_pennies(std::span<const PriceObservation> observations, std::optional<Money> price_cap,
                       const GroupBy& group_by);

enum class PenaltyRounding {
  OneDecimal,  // means rounded to 0.1 agora first, as published tables do
  Exact,
};

struct PenaltyRow {
  StoreType store_type{};
  Rational mean_after;   // agorot, after the rounding mode
  Rational mean_before;
  Rational difference;
  Rational volume;      // units
  Rational total;       // agorot
};

struct PenaltyTable {
  std::vector<PenaltyRow> rows;
  Rational grand_total;  // agorot
};

/// Per store type: (mean_after - mean_before) agorot times units sold.
/// Groups are matched on store type. Throws std::domain_error when the caps differ
/// or a store type in `volumes` lacks a mean on either side.
PenaltyTable inattention_penalty(const PennyStats& after, const PennyStats& before,
                                 const std::map<StoreType, Rational>& volumes,
                                 PenaltyRounding rounding = PenaltyRounding::OneDecimal);

/// Whole NIS, halves away from zero, from an amount in agorot.
BigInt to_whole_nis(const Rational& agorot);

/// Per-year values of `value(hist, key)` for every store type in the histogram.
template <typename F>
std::map<StoreType, std::map<int, double>> year_series(const EndingHistogram& hist, F value) {
  std::map<StoreType, std::map<int, double>> out;
  for (const auto& [key, counts] : hist.groups()) {
    if (key.store_type && key.year) out[*key.store_type][*key.year] = to_double(value(hist, key));
  }
  return out;
}

}  // namespace roundtax
