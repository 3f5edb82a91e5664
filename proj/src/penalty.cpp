#include "roundtax/penalty.hpp"

#include <stdexcept>

namespace roundtax {

std::string to_string(const GroupKey& key) {
  std::string out;
  if (key.store_type) out = std::string(to_string(*key.store_type));
  if (key.year) out += (out.empty() ? "" : "/") + std::to_string(*key.year);
  return out.empty() ? "all" : out;
}

void EndingHistogram::add(const GroupKey& key, Money price) {
  if (price.agorot() < 0) throw std::domain_error("negative price " + price.to_string());
  auto [it, inserted] = groups_.try_emplace(key);
  if (inserted) it->second.fill(0);
  ++it->second[static_cast<std::size_t>(price.ending())];
}

const EndingHistogram::Counts& EndingHistogram::counts(const GroupKey& key) const {
  const auto it = groups_.find(key);
  if (it == groups_.end()) throw std::out_of_range("no prices in group " + to_string(key));
  return it->second;
}

std::int64_t EndingHistogram::total(const GroupKey& key) const {
  std::int64_t n = 0;
  for (std::int64_t c : counts(key)) n += c;
  return n;
}

Rational EndingHistogram::share(const GroupKey& key, int residue) const {
  return Rational(counts(key).at(static_cast<std::size_t>(residue)), total(key));
}

Rational EndingHistogram::segment_share(const GroupKey& key, int segment) const {
  if (segment < 0 || segment > 9) throw std::domain_error("segment must be in 0..9");
  return share_in_range(*this, key, segment * 10, segment * 10 + 9);
}

GroupKey group_key(const PriceObservation& obs, const GroupBy& group_by) {
  GroupKey key;
  if (group_by.store_type) key.store_type = obs.store_type;
  if (group_by.year) key.year = obs.date.year;
  return key;
}

EndingHistogram ending_histogram(std::span<const PriceObservation> observations, const GroupBy& group_by) {
  EndingHistogram hist;
  for (const PriceObservation& obs : observations) hist.add(group_key(obs, group_by), obs.price);
  return hist;
}

Rational share_in_range(const EndingHistogram& hist, const GroupKey& key, int lo, int hi) {
  if (lo < 0 || lo > hi || hi > 99) throw std::domain_error("residue range must satisfy 0 <= lo <= hi <= 99");
  const auto& c = hist.counts(key);
  std::int64_t n = 0;
  for (int r = lo; r <= hi; ++r) n += c[static_cast<std::size_t>(r)];
  return Rational(n, hist.total(key));
}

Rational share_with_last_digit(const EndingHistogram& hist, const GroupKey& key, int digit) {
  if (digit < 0 || digit > 9) throw std::domain_error("digit must be in 0..9");
  const auto& c = hist.counts(key);
  std::int64_t n = 0;
  for (int r = digit; r < 100; r += 10) n += c[static_cast<std::size_t>(r)];
  return Rational(n, hist.total(key));
}

std::array<std::optional<Rational>, 10> segment_change(const EndingHistogram& a, const GroupKey& key_a,
                                                       const EndingHistogram& b, const GroupKey& key_b) {
  std::array<std::optional<Rational>, 10> out;
  for (int s = 0; s < 10; ++s) {
    const Rational before = a.segment_share(key_a, s);
    if (before == 0) continue;
    out[static_cast<std::size_t>(s)] = (b.segment_share(key_b, s) - before) / before * 100;
  }
  return out;
}

PennyStats avg_pennies(std::span<const PriceObservation> observations, std::optional<Money> price_cap,
                       const GroupBy& group_by) {
  struct Sum {
    std::int64_t agorot = 0;
    std::int64_t n = 0;
  };
  std::map<GroupKey, Sum> sums;
  for (const PriceObservation& obs : observations) {
    if (obs.price.agorot() < 0) throw std::domain_error("negative price " + obs.price.to_string());
    Sum& s = sums[group_key(obs, group_by)];
    if (price_cap && !(obs.price < *price_cap)) continue;
    s.agorot += obs.price.ending();
    ++s.n;
  }
  PennyStats stats;
  stats.price_cap = price_cap;
  for (const auto& [key, s] : sums) {
    if (s.n == 0) {
      stats.omitted.push_back(key);
    } else {
      stats.groups.push_back({key, Rational(s.agorot, s.n), s.n});
    }
  }
  return stats;
}

namespace {

const PennyGroup* find_store(const PennyStats& stats, StoreType type) {
  const PennyGroup* found = nullptr;
  for (const PennyGroup& g : stats.groups) {
    if (g.key.store_type != type) continue;
    if (found) throw std::domain_error("more than one penny group for " + std::string(to_string(type)));
    found = &g;
  }
  return found;
}

Rational round_to_tenth(const Rational& v) { return Rational(round_half_away(v * 10), 10); }

std::string cap_text(const std::optional<Money>& cap) { return cap ? cap->to_string() : "none"; }

}  // namespace

PenaltyTable inattention_penalty(const PennyStats& after, const PennyStats& before,
                                 const std::map<StoreType, Rational>& volumes, PenaltyRounding rounding) {
  if (after.price_cap != before.price_cap) {
    throw std::domain_error("price caps differ (" + cap_text(after.price_cap) + " after, " +
                            cap_text(before.price_cap) + " before)");
  }
  PenaltyTable table;
  for (const auto& [type, volume] : volumes) {
    const PennyGroup* a = find_store(after, type);
    const PennyGroup* b = find_store(before, type);
    if (!a || !b) throw std::domain_error("no average pennies for " + std::string(to_string(type)));
    PenaltyRow row{type, a->mean_agorot, b->mean_agorot, 0, volume, 0};
    if (rounding == PenaltyRounding::OneDecimal) {
      row.mean_after = round_to_tenth(row.mean_after);
      row.mean_before = round_to_tenth(row.mean_before);
    }
    row.difference = row.mean_after - row.mean_before;
    row.total = row.difference * row.volume;
    table.grand_total += row.total;
    table.rows.push_back(std::move(row));
  }
  return table;
}

BigInt to_whole_nis(const Rational& agorot) { return round_half_away(agorot / 100); }

}  // namespace roundtax
