#include "roundtax/distributions.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>

#include "roundtax/delimited.hpp"

namespace roundtax {

std::string_view to_string(StoreType type) {
  switch (type) {
    case StoreType::SupermarketsAndDrugstores: return "supermarkets";
    case StoreType::SmallGroceries: return "small_groceries";
    case StoreType::ConvenienceStores: return "convenience";
  }
  return "supermarkets";
}

std::string_view display_name(StoreType type) {
  switch (type) {
    case StoreType::SupermarketsAndDrugstores: return "Supermarkets and drugstores";
    case StoreType::SmallGroceries: return "Small groceries";
    case StoreType::ConvenienceStores: return "Convenience stores";
  }
  return "";
}

StoreType parse_store_type(std::string_view token) {
  for (StoreType t : kStoreTypes) {
    if (token == to_string(t)) return t;
  }
  throw std::invalid_argument("unknown store type '" + std::string(token) +
                              "' (expected supermarkets, small_groceries or convenience)");
}

namespace detail {

Pmf::Pmf(Vector<Rational> mass) {
  if (mass.size() == 0) throw std::invalid_argument("empty distribution");
  Rational total = 0;
  for (Eigen::Index i = 0; i < mass.size(); ++i) {
    if (mass[i] < 0) throw std::invalid_argument("negative probability mass at index " + std::to_string(i));
    total += mass[i];
  }
  if (abs(total - 1) > Rational(1, 1'000'000'000'000LL)) {
    throw std::invalid_argument("distribution not normalized (masses sum to " + to_decimal_string(total, 12) + ")");
  }
  mass_ = mass / total;

  cdf_.resize(static_cast<std::size_t>(mass_.size()));
  Rational running = 0;
  for (Eigen::Index i = 0; i < mass_.size(); ++i) {
    running += mass_[i];
    cdf_[static_cast<std::size_t>(i)] = to_double(running);
  }
  cdf_.back() = 1.0;
}

Eigen::Index Pmf::locate(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return it == cdf_.end() ? static_cast<Eigen::Index>(cdf_.size()) - 1 : it - cdf_.begin();
}

}  // namespace detail

EndingDistribution::EndingDistribution(Vector<Rational> mass) : pmf_(std::move(mass)) {}

EndingDistribution EndingDistribution::uniform(int modulus) {
  return EndingDistribution(Vector<Rational>::Constant(modulus, Rational(1, modulus)));
}

EndingDistribution EndingDistribution::point_mass(int residue, int modulus) {
  if (residue < 0 || residue >= modulus) throw std::invalid_argument("residue outside modulus");
  Vector<Rational> mass = Vector<Rational>::Zero(modulus);
  mass[residue] = 1;
  return EndingDistribution(std::move(mass));
}

EndingDistribution EndingDistribution::collapse(int target) const {
  if (target <= 0 || modulus() % target != 0) {
    throw std::invalid_argument("cannot collapse modulus " + std::to_string(modulus()) + " to " +
                                std::to_string(target));
  }
  Vector<Rational> folded = Vector<Rational>::Zero(target);
  for (int r = 0; r < modulus(); ++r) folded[r % target] += mass(r);
  return EndingDistribution(std::move(folded));
}

BasketSizeDistribution::BasketSizeDistribution(Vector<Rational> mass) : pmf_(std::move(mass)) {}

BasketSizeDistribution BasketSizeDistribution::point_mass(int size) {
  if (size < 1) throw std::invalid_argument("basket size must be at least 1");
  Vector<Rational> mass = Vector<Rational>::Zero(size);
  mass[size - 1] = 1;
  return BasketSizeDistribution(std::move(mass));
}

void normalize_profile_set(std::vector<StoreProfile>& profiles) {
  if (profiles.empty()) throw std::invalid_argument("no store profiles");
  Rational total = 0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const StoreProfile& p = profiles[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (profiles[j].store_type == p.store_type) {
        throw std::invalid_argument("duplicate profile for " + std::string(to_string(p.store_type)));
      }
    }
    if (p.annual_transactions <= 0) {
      throw std::invalid_argument("annual_transactions must be positive for " + std::string(to_string(p.store_type)));
    }
    if (p.revenue_share < 0 || p.revenue_share > 1) {
      throw std::invalid_argument("revenue_share outside [0, 1] for " + std::string(to_string(p.store_type)));
    }
    total += p.revenue_share;
  }
  if (to_double(abs(total - 1)) > kRevenueShareSlack) {
    throw std::invalid_argument("revenue shares sum to " + to_decimal_string(total, 6) + ", not 1");
  }
  for (StoreProfile& p : profiles) p.revenue_share /= total;
}

namespace {

struct ProfileRows {
  std::map<int, Rational> endings;
  std::map<int, Rational> baskets;
  int ending_line = 0;
  int basket_line = 0;
  int meta_line = 0;
  std::optional<std::int64_t> transactions;
  std::optional<Rational> revenue_share;
};

Rational read_mass(const DelimitedReader& reader, const std::string& text, const std::string& field) {
  Rational value;
  try {
    value = parse_rational(text);
  } catch (const std::invalid_argument& e) {
    reader.fail(field, e.what());
  }
  if (value < 0) reader.fail(field, "negative value " + text);
  return value;
}

}  // namespace

std::vector<StoreProfile> load_profiles(const std::string& path) {
  DelimitedReader reader(path);
  std::map<StoreType, ProfileRows> rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 4) reader.fail("", "expected 4 fields, found " + std::to_string(f.size()));
    StoreType type{};
    try {
      type = parse_store_type(f[0]);
    } catch (const std::invalid_argument& e) {
      reader.fail("store_type", e.what());
    }
    ProfileRows& r = rows[type];
    const std::string& kind = f[1];
    if (kind == "ending") {
      const auto residue = reader.integer(f[2], "index");
      if (residue < 0 || residue > 99) reader.fail("index", "ending residue must be in 0..99");
      if (!r.endings.emplace(static_cast<int>(residue), read_mass(reader, f[3], "mass")).second) {
        reader.fail("index", "duplicate ending residue " + f[2]);
      }
      r.ending_line = reader.line();
    } else if (kind == "basket") {
      const auto size = reader.integer(f[2], "index");
      if (size < 1 || size > 1'000'000) reader.fail("index", "basket size must be in 1..1000000");
      if (!r.baskets.emplace(static_cast<int>(size), read_mass(reader, f[3], "mass")).second) {
        reader.fail("index", "duplicate basket size " + f[2]);
      }
      r.basket_line = reader.line();
    } else if (kind == "meta") {
      if (r.transactions) reader.fail("kind", "duplicate meta row");
      r.transactions = reader.integer(f[2], "annual_transactions");
      if (*r.transactions <= 0) reader.fail("annual_transactions", "must be positive");
      r.revenue_share = read_mass(reader, f[3], "revenue_share");
      if (*r.revenue_share > 1) reader.fail("revenue_share", "must be in [0, 1]");
      r.meta_line = reader.line();
    } else {
      reader.fail("kind", "unknown row kind '" + kind + "' (expected ending, basket or meta)");
    }
  }

  std::vector<StoreProfile> profiles;
  for (auto& [type, r] : rows) {
    const std::string name(to_string(type));
    if (r.endings.empty()) throw ParseError(path, 0, "kind", "no ending rows for " + name);
    if (r.baskets.empty()) throw ParseError(path, 0, "kind", "no basket rows for " + name);
    if (!r.transactions) throw ParseError(path, 0, "kind", "no meta row for " + name);

    Vector<Rational> endings = Vector<Rational>::Zero(100);
    for (const auto& [residue, m] : r.endings) endings[residue] = m;
    Vector<Rational> baskets = Vector<Rational>::Zero(r.baskets.rbegin()->first);
    for (const auto& [size, m] : r.baskets) baskets[size - 1] = m;

    try {
      EndingDistribution ending_dist(std::move(endings));
      try {
        BasketSizeDistribution basket_dist(std::move(baskets));
        profiles.push_back({type, std::move(ending_dist), std::move(basket_dist), *r.transactions, *r.revenue_share});
      } catch (const std::invalid_argument& e) {
        throw ParseError(path, r.basket_line, "mass", name + " basket " + e.what());
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, r.ending_line, "mass", name + " ending " + e.what());
    }
  }
  if (profiles.empty()) throw ParseError(path, 0, "", "no profiles");
  try {
    normalize_profile_set(profiles);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, rows.rbegin()->second.meta_line, "revenue_share", e.what());
  }
  return profiles;
}

Date parse_iso_date(std::string_view text) {
  Date d;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      std::sscanf(std::string(text).c_str(), "%4d-%2d-%2d", &d.year, &d.month, &d.day) != 3 || d.month < 1 ||
      d.month > 12 || d.day < 1 || d.day > 31) {
    throw std::invalid_argument("not an ISO-8601 date: '" + std::string(text) + "'");
  }
  return d;
}

std::vector<PriceObservation> load_price_observations(const std::string& path) {
  DelimitedReader reader(path);
  std::vector<PriceObservation> out;
  std::vector<std::string> f;
  bool first = true;
  while (reader.next(f)) {
    if (first && !f.empty() && f[0] == "store_id") {
      first = false;
      continue;
    }
    first = false;
    if (f.size() != 5) reader.fail("", "expected 5 fields, found " + std::to_string(f.size()));
    PriceObservation obs{f[0], StoreType{}, f[2], {}, Money{}};
    try {
      obs.store_type = parse_store_type(f[1]);
    } catch (const std::invalid_argument& e) {
      reader.fail("store_type", e.what());
    }
    try {
      obs.date = parse_iso_date(f[3]);
    } catch (const std::invalid_argument& e) {
      reader.fail("date", e.what());
    }
    obs.price = Money(reader.integer(f[4], "price_agorot"));
    if (obs.price.agorot() < 0) reader.fail("price_agorot", "negative price");
    out.push_back(std::move(obs));
  }
  return out;
}

void write_price_observations(const std::string& path, std::span<const PriceObservation> observations) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "store_id,store_type,product_id,date,price_agorot\n";
  char date[16];
  for (const PriceObservation& o : observations) {
    std::snprintf(date, sizeof date, "%04d-%02d-%02d", o.date.year, o.date.month, o.date.day);
    out << o.store_id << ',' << to_string(o.store_type) << ',' << o.product_id << ',' << date << ','
        << o.price.agorot() << '\n';
  }
}

EndingDistribution empirical_ending_distribution(std::span<const Money> prices, int modulus) {
  if (prices.empty()) throw std::domain_error("no prices to estimate an ending distribution from");
  if (modulus != 10 && modulus != 100) throw std::domain_error("ending modulus must be 10 or 100");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(modulus), 0);
  for (Money p : prices) {
    if (p.agorot() < 0) throw std::domain_error("negative price " + p.to_string());
    ++counts[static_cast<std::size_t>(p.agorot() % modulus)];
  }
  Vector<Rational> mass(modulus);
  const auto n = static_cast<std::int64_t>(prices.size());
  for (int r = 0; r < modulus; ++r) mass[r] = Rational(counts[static_cast<std::size_t>(r)], n);
  return EndingDistribution(std::move(mass));
}

EndingDistribution empirical_ending_distribution(std::span<const PriceObservation> observations, int modulus) {
  std::vector<Money> prices;
  prices.reserve(observations.size());
  for (const PriceObservation& o : observations) prices.push_back(o.price);
  return empirical_ending_distribution(prices, modulus);
}

double total_variation(const EndingDistribution& a, const EndingDistribution& b) {
  if (a.modulus() != b.modulus()) throw std::invalid_argument("moduli differ");
  Rational sum = 0;
  for (int r = 0; r < a.modulus(); ++r) sum += abs(a.mass(r) - b.mass(r));
  return to_double(sum) / 2.0;
}

}  // namespace roundtax
