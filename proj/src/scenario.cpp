#include "roundtax/scenario.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace roundtax {

namespace {

std::string name(StoreType t) { return std::string(to_string(t)); }

const Rational& lookup(const std::map<StoreType, Rational>& m, StoreType t, const char* what) {
  const auto it = m.find(t);
  if (it == m.end()) throw std::domain_error(std::string("no ") + what + " for store type " + name(t));
  return it->second;
}

void check_aligned(std::span<const StoreProfile> profiles, const std::map<StoreType, Rational>& m, const char* what) {
  if (m.size() != profiles.size()) {
    throw std::domain_error(std::string(what) + " cover " + std::to_string(m.size()) + " store types but " +
                            std::to_string(profiles.size()) + " profiles were given");
  }
  for (const StoreProfile& p : profiles) lookup(m, p.store_type, what);
}

}  // namespace

CashShareScenario uniform_scenario(std::span<const StoreProfile> profiles, const Rational& share) {
  CashShareScenario s;
  for (const StoreProfile& p : profiles) {
    s.shares[p.store_type] = share;
    s.aggregate_target += p.revenue_share * share;
  }
  return s;
}

void validate_scenario(std::span<const StoreProfile> profiles, const CashShareScenario& scenario) {
  check_aligned(profiles, scenario.shares, "cash shares");
  Rational aggregate = 0;
  for (const StoreProfile& p : profiles) {
    const Rational& s = scenario.shares.at(p.store_type);
    if (s < 0 || s > 1) throw std::domain_error("cash share outside [0, 1] for " + name(p.store_type));
    aggregate += p.revenue_share * s;
  }
  if (to_double(abs(aggregate - scenario.aggregate_target)) > 1e-9) {
    throw std::domain_error("revenue-weighted cash share " + to_decimal_string(aggregate, 9) +
                            " does not match target " + to_decimal_string(scenario.aggregate_target, 9));
  }
}

TaxTable total_tax(std::span<const StoreProfile> profiles, const StoreTaxes& avg_taxes,
                   const CashShareScenario& scenario) {
  check_aligned(profiles, avg_taxes, "average taxes");
  validate_scenario(profiles, scenario);
  TaxTable table;
  for (const StoreProfile& p : profiles) {
    TaxTableRow row{p.store_type, avg_taxes.at(p.store_type), p.annual_transactions, scenario.shares.at(p.store_type),
                    0};
    row.total = row.avg_tax * Rational(row.transactions) * row.cash_share;
    table.grand_total += row.total;
    table.rows.push_back(std::move(row));
  }
  return table;
}

ExtremeScenarios extreme_scenarios(std::span<const StoreProfile> profiles, const StoreTaxes& avg_taxes,
                                   const Rational& aggregate_target) {
  check_aligned(profiles, avg_taxes, "average taxes");
  Rational capacity = 0;
  for (const StoreProfile& p : profiles) capacity += p.revenue_share;
  if (aggregate_target < 0 || aggregate_target > capacity) {
    throw std::domain_error("aggregate cash share " + to_decimal_string(aggregate_target, 6) +
                            " is infeasible (must be in [0, " + to_decimal_string(capacity, 6) + "])");
  }

  struct Item {
    std::size_t order;
    StoreType type;
    Rational value;   // tax per unit of cash share
    Rational weight;  // revenue share
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const StoreProfile& p = profiles[i];
    items.push_back({static_cast<std::size_t>(p.store_type), p.store_type,
                     avg_taxes.at(p.store_type) * Rational(p.annual_transactions), p.revenue_share});
  }

  // Stores with zero revenue weight do not touch the constraint; they sit at
  // whichever bound favours the objective. The rest are ordered by value/weight.
  const auto solve = [&](bool maximise) {
    std::vector<Item> order = items;
    std::sort(order.begin(), order.end(), [&](const Item& a, const Item& b) {
      const bool a_free = a.weight == 0;
      const bool b_free = b.weight == 0;
      if (a_free != b_free) return a_free;
      if (!a_free) {
        const Rational lhs = a.value * b.weight;  // compare a.value/a.weight with b.value/b.weight
        const Rational rhs = b.value * a.weight;
        if (lhs != rhs) return maximise ? lhs > rhs : lhs < rhs;
      }
      return a.order < b.order;
    });
    CashShareScenario scenario;
    scenario.aggregate_target = aggregate_target;
    Rational remaining = aggregate_target;
    for (const Item& it : order) {
      Rational s = 0;
      if (it.weight == 0) {
        s = (maximise ? it.value > 0 : it.value < 0) ? 1 : 0;
      } else if (remaining > 0) {
        s = std::min(Rational(1), remaining / it.weight);
        remaining -= s * it.weight;
      }
      scenario.shares[it.type] = s;
    }
    return scenario;
  };

  ExtremeScenarios out;
  out.max_scenario = solve(true);
  out.max_table = total_tax(profiles, avg_taxes, out.max_scenario);
  out.min_scenario = solve(false);
  out.min_table = total_tax(profiles, avg_taxes, out.min_scenario);
  return out;
}

}  // namespace roundtax
