#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "roundtax/money.hpp"

namespace roundtax {

/// Interned identifiers: string <-> dense int.
class Dictionary {
 public:
  int intern(const std::string& name);
  const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(names_.size()); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

/// Weekly sales of one product in one store.
struct DemandRecord {
  int product = 0;
  int store = 0;
  int chain = 0;
  int category = 0;
  int week = 0;
  int year = 0;
  int month = 0;
  Money price;
  /// False when the recorded (average) price had digits below one agora; the
  /// price is then only approximate and the record is dropped by cleaning.
  bool price_exact = true;
  double quantity = 0.0;
};

struct DemandPanel {
  std::vector<DemandRecord> records;
  Dictionary products;
  Dictionary stores;
  Dictionary chains;
  Dictionary categories;
};

/// Throws std::domain_error unless quantity > 0, price > 0 and (product, store, week) is unique.
void validate_panel(const DemandPanel& panel);

/// Header row `product_id,store_id,chain_id,category_id,week,year,month,price_agorot,quantity`.
/// A price_agorot with a nonzero fractional part is kept but flagged inexact.
DemandPanel load_demand_panel(const std::string& path);
void write_demand_panel(const std::string& path, const DemandPanel& panel);

struct PairKey {
  int product = 0;
  int store = 0;
  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

/// Most frequent 99-ending price of a product-store pair among its exact
/// base-year prices; ties go to the lower price. Empty when no 99-ending price occurs.
std::optional<Money> find_modal_99_price(const DemandPanel& panel, int product, int store, int base_year);

struct DummyFlags {
  bool usable = false;  // survives the price-cleaning rule
  bool d99 = false;     // base year, at the modal 99-ending price
  bool d90 = false;     // post year, 9 agorot below the mode
  bool d00 = false;     // post year, 1 agora above the mode
};

struct DummyAssignment {
  int base_year = 0;
  int post_year = 0;
  std::vector<DummyFlags> flags;  // parallel to panel.records
  std::map<PairKey, Money> modes;
};

/// Cleans prices and sets the discontinuity dummies for every record.
///
/// Inexact prices are unusable, and so is any price from post_year on whose
/// agorot are not a multiple of 10. Modes come from usable base-year records.
/// Throws std::domain_error when base_year >= post_year.
DummyAssignment assign_dummies(const DemandPanel& panel, int base_year, int post_year);

/// Keeps a record only when its product-store price is unchanged over a run
/// of at least `min_weeks` consecutive weeks containing it.
DemandPanel filter_durable_prices(const DemandPanel& panel, int min_weeks);

/// Month-level prices for the price-change regression.
struct MonthlyRecord {
  int product = 0;
  int store = 0;
  int chain = 0;
  int category = 0;
  int year = 0;
  int month = 0;
  Money price;
};

struct MonthlyPanel {
  std::vector<MonthlyRecord> records;
  Dictionary products;
  Dictionary stores;
  Dictionary chains;
  Dictionary categories;
};

/// Header row `product_id,store_id,chain_id,category_id,year,month,price_agorot`.
MonthlyPanel load_monthly_panel(const std::string& path);
void write_monthly_panel(const std::string& path, const MonthlyPanel& panel);

}  // namespace roundtax
