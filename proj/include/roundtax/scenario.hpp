#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "roundtax/distributions.hpp"
#include "roundtax/rational.hpp"

namespace roundtax {

/// Expected rounding tax per cash transaction, in agorot, keyed by store type.
using StoreTaxes = std::map<StoreType, Rational>;

/// Fraction of transactions paid in cash per store type, and the
/// revenue-weighted aggregate those fractions must reproduce.
struct CashShareScenario {
  std::map<StoreType, Rational> shares;
  Rational aggregate_target;
};

/// Every store at the same cash share; the target is the implied aggregate.
CashShareScenario uniform_scenario(std::span<const StoreProfile> profiles, const Rational& share);

/// Throws std::domain_error unless every share is in [0, 1], every profile has
/// a share, and sum_i revenue_share_i * s_i equals the target within 1e-9.
void validate_scenario(std::span<const StoreProfile> profiles, const CashShareScenario& scenario);

struct TaxTableRow {
  StoreType store_type;
  Rational avg_tax;   // agorot per cash transaction
  std::int64_t transactions;
  Rational cash_share;
  Rational total;     // agorot per year
};

struct TaxTable {
  std::vector<TaxTableRow> rows;
  Rational grand_total;  // agorot; exactly the sum of the rows
};

/// Annual rounding tax: per store avg_tax * transactions * cash share.
/// Profiles, taxes and shares must cover the same store types (std::domain_error otherwise).
TaxTable total_tax(std::span<const StoreProfile> profiles, const StoreTaxes& avg_taxes,
                   const CashShareScenario& scenario);

struct ExtremeScenarios {
  CashShareScenario max_scenario;
  TaxTable max_table;
  CashShareScenario min_scenario;
  TaxTable min_table;
};

/// Cash shares that maximise and minimise the total tax while the
/// revenue-weighted cash share stays at `aggregate_target`.
///
/// With a single linear constraint and box bounds the optimum is a vertex: the
/// greedy fill by tax-per-unit-revenue ratio is exact. Equal ratios keep
/// kStoreTypes order. Throws std::domain_error when the target is outside
/// [0, sum of revenue shares].
ExtremeScenarios extreme_scenarios(std::span<const StoreProfile> profiles, const StoreTaxes& avg_taxes,
                                   const Rational& aggregate_target);

}  // namespace roundtax
