#include "roundtax/econometrics/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <tuple>

#include "roundtax/delimited.hpp"
#include "roundtax/rational.hpp"

namespace roundtax {

int Dictionary::intern(const std::string& name) {
  const auto [it, inserted] = index_.emplace(name, static_cast<int>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

void validate_panel(const DemandPanel& panel) {
  std::set<std::tuple<int, int, int>> seen;
  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const DemandRecord& r = panel.records[i];
    const std::string where = "record " + std::to_string(i + 1);
    if (!(r.quantity > 0.0)) throw std::domain_error(where + ": quantity must be positive");
    if (r.price.agorot() <= 0) throw std::domain_error(where + ": price must be positive");
    if (!seen.emplace(r.product, r.store, r.week).second) {
      throw std::domain_error(where + ": duplicate (product, store, week)");
    }
  }
}

namespace {

void expect_header(DelimitedReader& reader, std::vector<std::string>& f, const std::vector<std::string>& header) {
  if (!reader.next(f)) reader.fail("", "empty file");
  if (f != header) {
    std::string expected;
    for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
    reader.fail("", "expected header row '" + expected + "'");
  }
}

int small_int(const DelimitedReader& reader, const std::string& text, const std::string& field) {
  const std::int64_t v = reader.integer(text, field);
  if (v < -1'000'000'000 || v > 1'000'000'000) reader.fail(field, "out of range");
  return static_cast<int>(v);
}

/// Integer agorot, or a decimal average price flagged inexact.
std::pair<Money, bool> read_price(const DelimitedReader& reader, const std::string& text) {
  Rational value;
  try {
    value = parse_decimal(text);
  } catch (const std::invalid_argument& e) {
    reader.fail("price_agorot", e.what());
  }
  const BigInt nearest = round_half_away(value);
  return {Money(nearest.convert_to<std::int64_t>()), Rational(nearest) == value};
}

const std::vector<std::string> kDemandHeader{"product_id", "store_id", "chain_id", "category_id", "week",
                                             "year",       "month",    "price_agorot", "quantity"};
const std::vector<std::string> kMonthlyHeader{"product_id", "store_id", "chain_id",    "category_id",
                                              "year",       "month",    "price_agorot"};

}  // namespace

DemandPanel load_demand_panel(const std::string& path) {
  DelimitedReader reader(path);
  std::vector<std::string> f;
  expect_header(reader, f, kDemandHeader);
  DemandPanel panel;
  while (reader.next(f)) {
    if (f.size() != kDemandHeader.size()) reader.fail("", "expected 9 fields, found " + std::to_string(f.size()));
    DemandRecord r;
    r.product = panel.products.intern(f[0]);
    r.store = panel.stores.intern(f[1]);
    r.chain = panel.chains.intern(f[2]);
    r.category = panel.categories.intern(f[3]);
    r.week = small_int(reader, f[4], "week");
    r.year = small_int(reader, f[5], "year");
    r.month = small_int(reader, f[6], "month");
    if (r.month < 1 || r.month > 12) reader.fail("month", "must be in 1..12");
    std::tie(r.price, r.price_exact) = read_price(reader, f[7]);
    if (r.price.agorot() <= 0) reader.fail("price_agorot", "must be positive");
    r.quantity = reader.real(f[8], "quantity");
    if (!(r.quantity > 0.0)) reader.fail("quantity", "must be positive");
    panel.records.push_back(r);
  }
  try {
    validate_panel(panel);
  } catch (const std::domain_error& e) {
    throw ParseError(path, 0, "", e.what());
  }
  return panel;
}

void write_demand_panel(const std::string& path, const DemandPanel& panel) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "product_id,store_id,chain_id,category_id,week,year,month,price_agorot,quantity\n";
  char qty[40];
  for (const DemandRecord& r : panel.records) {
    std::snprintf(qty, sizeof qty, "%.17g", r.quantity);
    out << panel.products.name(r.product) << ',' << panel.stores.name(r.store) << ','
        << panel.chains.name(r.chain) << ',' << panel.categories.name(r.category) << ',' << r.week << ','
        << r.year << ',' << r.month << ',' << r.price.agorot() << ',' << qty << '\n';
  }
}

namespace {

std::optional<Money> modal_99(const std::map<std::int64_t, int>& counts) {
  std::optional<Money> best;
  int best_count = 0;
  for (const auto& [price, count] : counts) {  // ascending price, so ties keep the lower one
    if (count > best_count) {
      best = Money(price);
      best_count = count;
    }
  }
  return best;
}

bool usable_price(const DemandRecord& r, int post_year) {
  if (!r.price_exact) return false;
  return r.year < post_year || r.price.agorot() % 10 == 0;
}

}  // namespace

std::optional<Money> find_modal_99_price(const DemandPanel& panel, int product, int store, int base_year) {
  std::map<std::int64_t, int> counts;
  for (const DemandRecord& r : panel.records) {
    if (r.product == product && r.store == store && r.year == base_year && r.price_exact && r.price.ending() == 99) {
      ++counts[r.price.agorot()];
    }
  }
  return modal_99(counts);
}

DummyAssignment assign_dummies(const DemandPanel& panel, int base_year, int post_year) {
  if (base_year >= post_year) {
    throw std::domain_error("base year " + std::to_string(base_year) + " must precede post year " +
                            std::to_string(post_year));
  }
  DummyAssignment out;
  out.base_year = base_year;
  out.post_year = post_year;
  out.flags.resize(panel.records.size());

  std::map<PairKey, std::map<std::int64_t, int>> counts;
  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const DemandRecord& r = panel.records[i];
    out.flags[i].usable = usable_price(r, post_year);
    if (out.flags[i].usable && r.year == base_year && r.price.ending() == 99) {
      ++counts[{r.product, r.store}][r.price.agorot()];
    }
  }
  for (const auto& [pair, c] : counts) {
    if (auto mode = modal_99(c)) out.modes.emplace(pair, *mode);
  }

  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const DemandRecord& r = panel.records[i];
    DummyFlags& f = out.flags[i];
    if (!f.usable) continue;
    const auto it = out.modes.find({r.product, r.store});
    if (it == out.modes.end()) continue;
    const Money mode = it->second;
    if (r.year == base_year) {
      f.d99 = r.price == mode;
    } else if (r.year == post_year) {
      f.d00 = r.price == mode + Money(1);
      f.d90 = r.price == mode - Money(9);
    }
  }
  return out;
}

DemandPanel filter_durable_prices(const DemandPanel& panel, int min_weeks) {
  if (min_weeks < 1) throw std::invalid_argument("min_weeks must be at least 1");
  std::map<PairKey, std::vector<std::size_t>> by_pair;
  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    by_pair[{panel.records[i].product, panel.records[i].store}].push_back(i);
  }
  std::vector<char> keep(panel.records.size(), 0);
  for (auto& [pair, rows] : by_pair) {
    std::sort(rows.begin(), rows.end(),
              [&](std::size_t a, std::size_t b) { return panel.records[a].week < panel.records[b].week; });
    std::size_t start = 0;
    for (std::size_t i = 1; i <= rows.size(); ++i) {
      const bool run_continues = i < rows.size() &&
                                 panel.records[rows[i]].week == panel.records[rows[i - 1]].week + 1 &&
                                 panel.records[rows[i]].price == panel.records[rows[i - 1]].price;
      if (run_continues) continue;
      if (static_cast<int>(i - start) >= min_weeks) {
        for (std::size_t j = start; j < i; ++j) keep[rows[j]] = 1;
      }
      start = i;
    }
  }
  DemandPanel out = panel;
  out.records.clear();
  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    if (keep[i]) out.records.push_back(panel.records[i]);
  }
  return out;
}

MonthlyPanel load_monthly_panel(const std::string& path) {
  DelimitedReader reader(path);
  std::vector<std::string> f;
  expect_header(reader, f, kMonthlyHeader);
  MonthlyPanel panel;
  std::set<std::tuple<int, int, int, int>> seen;
  while (reader.next(f)) {
    if (f.size() != kMonthlyHeader.size()) reader.fail("", "expected 7 fields, found " + std::to_string(f.size()));
    MonthlyRecord r;
    r.product = panel.products.intern(f[0]);
    r.store = panel.stores.intern(f[1]);
    r.chain = panel.chains.intern(f[2]);
    r.category = panel.categories.intern(f[3]);
    r.year = small_int(reader, f[4], "year");
    r.month = small_int(reader, f[5], "month");
    if (r.month < 1 || r.month > 12) reader.fail("month", "must be in 1..12");
    r.price = Money(reader.integer(f[6], "price_agorot"));
    if (r.price.agorot() <= 0) reader.fail("price_agorot", "must be positive");
    if (!seen.emplace(r.product, r.store, r.year, r.month).second) {
      reader.fail("month", "duplicate (product, store, year, month)");
    }
    panel.records.push_back(r);
  }
  return panel;
}

void write_monthly_panel(const std::string& path, const MonthlyPanel& panel) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "product_id,store_id,chain_id,category_id,year,month,price_agorot\n";
  for (const MonthlyRecord& r : panel.records) {
    out << panel.products.name(r.product) << ',' << panel.stores.name(r.store) << ','
        << panel.chains.name(r.chain) << ',' << panel.categories.name(r.category) << ',' << r.year << ','
        << r.month << ',' << r.price.agorot() << '\n';
  }
}

}  // namespace roundtax
