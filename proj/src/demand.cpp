#include "roundtax/econometrics/demand.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace roundtax {

std::string_view to_string(FixedEffect fe) {
  switch (fe) {
    case FixedEffect::ProductStore: return "product_store";
    case FixedEffect::CategoryYear: return "cat_year";
    case FixedEffect::CategoryMonth: return "cat_month";
    case FixedEffect::Chain: return "chain";
  }
  return "?";
}

FixedEffect parse_fixed_effect(std::string_view token) {
  for (FixedEffect fe : {FixedEffect::ProductStore, FixedEffect::CategoryYear, FixedEffect::CategoryMonth,
                         FixedEffect::Chain}) {
    if (token == to_string(fe)) return fe;
  }
  throw std::invalid_argument("unknown fixed effect '" + std::string(token) +
                              "' (expected product_store, cat_year, cat_month or chain)");
}

std::string_view to_string(PairRestriction r) {
  switch (r) {
    case PairRestriction::BothEndings: return "both-endings";
    case PairRestriction::EitherEnding: return "either-ending";
    case PairRestriction::None: return "none";
  }
  return "?";
}

PairRestriction parse_restriction(std::string_view token) {
  for (PairRestriction r : {PairRestriction::BothEndings, PairRestriction::EitherEnding, PairRestriction::None}) {
    if (token == to_string(r)) return r;
  }
  throw std::invalid_argument("unknown restriction '" + std::string(token) +
                              "' (expected both-endings, either-ending or none)");
}

std::vector<std::size_t> select_sample(const DemandPanel& panel, const DummyAssignment& dummies,
                                       const SampleRestrictions& restrictions) {
  if (dummies.flags.size() != panel.records.size()) {
    throw std::invalid_argument("dummy assignment does not match the panel");
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const DemandRecord& r = panel.records[i];
    if (!dummies.flags[i].usable) continue;
    if (restrictions.price_cap && !(r.price < *restrictions.price_cap)) continue;
    if (restrictions.before_year && r.year >= *restrictions.before_year) continue;
    rows.push_back(i);
  }
  if (restrictions.pairs == PairRestriction::None) return rows;

  struct Seen {
    bool d90 = false;
    bool d00 = false;
  };
  std::map<PairKey, Seen> seen;
  for (std::size_t i : rows) {
    const DemandRecord& r = panel.records[i];
    Seen& s = seen[{r.product, r.store}];
    s.d90 = s.d90 || dummies.flags[i].d90;
    s.d00 = s.d00 || dummies.flags[i].d00;
  }
  const bool both = restrictions.pairs == PairRestriction::BothEndings;
  std::erase_if(rows, [&](std::size_t i) {
    const DemandRecord& r = panel.records[i];
    if (!dummies.modes.contains({r.product, r.store})) return true;
    const Seen& s = seen.at({r.product, r.store});
    return both ? !(s.d90 && s.d00) : !(s.d90 || s.d00);
  });
  return rows;
}

namespace {

std::int64_t pack(std::int64_t a, std::int64_t b) { return (a << 32) | (b & 0xffffffff); }

FixedEffectGrouping demand_grouping(FixedEffect fe, const DemandPanel& panel, const std::vector<std::size_t>& rows) {
  std::vector<std::int64_t> keys;
  keys.reserve(rows.size());
  for (std::size_t i : rows) {
    const DemandRecord& r = panel.records[i];
    switch (fe) {
      case FixedEffect::ProductStore: keys.push_back(pack(r.product, r.store)); break;
      case FixedEffect::CategoryYear: keys.push_back(pack(r.category, r.year)); break;
      case FixedEffect::CategoryMonth: keys.push_back(pack(r.category, r.month)); break;
      case FixedEffect::Chain: keys.push_back(r.chain); break;
    }
  }
  return make_grouping(std::string(to_string(fe)), keys);
}

}  // namespace

RegressionResult estimate_demand(const DemandPanel& panel, const DummyAssignment& dummies,
                                 const DemandSpecification& spec) {
  const std::vector<std::size_t> rows = select_sample(panel, dummies, spec.restrictions);
  if (rows.empty()) throw std::domain_error("no observations left after the sample restrictions");

  std::vector<std::string> names{"D90", "D00"};
  if (spec.include_d99) names.emplace_back("D99");
  names.emplace_back("lnP");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(names.size());

  Eigen::VectorXd y(n);
  Eigen::MatrixXd X(n, p);
  double price_sum = 0.0;
  std::set<PairKey> pairs;
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::size_t i = rows[static_cast<std::size_t>(k)];
    const DemandRecord& r = panel.records[i];
    const DummyFlags& f = dummies.flags[i];
    y(k) = std::log(r.quantity);
    Eigen::Index c = 0;
    X(k, c++) = f.d90 ? 1.0 : 0.0;
    X(k, c++) = f.d00 ? 1.0 : 0.0;
    if (spec.include_d99) X(k, c++) = f.d99 ? 1.0 : 0.0;
    X(k, c) = std::log(r.price.to_nis());
    price_sum += r.price.to_nis();
    pairs.insert({r.product, r.store});
  }

  std::vector<FixedEffectGrouping> groupings;
  for (FixedEffect fe : spec.fixed_effects) groupings.push_back(demand_grouping(fe, panel, rows));
  const FixedEffectsFit fit = fit_fixed_effects(y, X, names, groupings, spec.absorption);

  RegressionResult out;
  Eigen::Index c = 0;
  out.beta90 = fit.ols.coef(c);
  out.se90 = fit.ols.std_error(c++);
  out.beta00 = fit.ols.coef(c);
  out.se00 = fit.ols.std_error(c++);
  if (spec.include_d99) {
    out.beta99 = fit.ols.coef(c);
    out.se99 = fit.ols.std_error(c++);
  }
  out.epsilon = fit.ols.coef(c);
  out.se_epsilon = fit.ols.std_error(c);
  out.intercept = fit.intercept;
  out.n_observations = n;
  out.n_pairs = static_cast<std::int64_t>(pairs.size());
  out.mean_price = price_sum / static_cast<double>(n);
  if (out.epsilon < 0.0) out.theta_hat = compute_theta(out);
  out.sweeps = fit.sweeps;
  out.absorbed_dof = fit.absorbed_dof;
  out.sigma2 = fit.ols.sigma2;
  return out;
}

double compute_theta(double beta90, double beta00, double epsilon, double mean_price) {
  if (!(epsilon < 0.0)) {
    throw std::domain_error("theta is undefined for a non-negative price elasticity (" + std::to_string(epsilon) + ")");
  }
  return (beta90 - beta00) / -epsilon * mean_price;
}

double compute_theta(const RegressionResult& result) {
  return compute_theta(result.beta90, result.beta00, result.epsilon, result.mean_price);
}

std::string_view to_string(PremiumEffect fe) {
  switch (fe) {
    case PremiumEffect::Year: return "year";
    case PremiumEffect::Month: return "month";
    case PremiumEffect::Product: return "product";
    case PremiumEffect::Store: return "store";
  }
  return "?";
}

PremiumEffect parse_premium_effect(std::string_view token) {
  for (PremiumEffect fe : {PremiumEffect::Year, PremiumEffect::Month, PremiumEffect::Product, PremiumEffect::Store}) {
    if (token == to_string(fe)) return fe;
  }
  throw std::invalid_argument("unknown fixed effect '" + std::string(token) +
                              "' (expected year, month, product or store)");
}

std::vector<PriceChange> price_changes(const MonthlyPanel& panel) {
  std::vector<std::size_t> order(panel.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto month_index = [&](std::size_t i) { return panel.records[i].year * 12 + panel.records[i].month - 1; };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const MonthlyRecord& ra = panel.records[a];
    const MonthlyRecord& rb = panel.records[b];
    if (ra.product != rb.product) return ra.product < rb.product;
    if (ra.store != rb.store) return ra.store < rb.store;
    return month_index(a) < month_index(b);
  });

  std::vector<PriceChange> out;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const MonthlyRecord& prev = panel.records[order[k - 1]];
    const MonthlyRecord& cur = panel.records[order[k]];
    if (prev.product != cur.product || prev.store != cur.store) continue;
    if (month_index(order[k]) != month_index(order[k - 1]) + 1) continue;
    if (cur.price == prev.price) continue;
    out.push_back({cur.product, cur.store, cur.year, cur.month,
                   std::log(static_cast<double>(cur.price.agorot())) - std::log(static_cast<double>(prev.price.agorot())),
                   cur.price.ending() == 90});
  }
  return out;
}

PremiumResult price_change_premium(const MonthlyPanel& panel, const std::set<PremiumEffect>& fixed_effects,
                                   const AbsorptionSettings& settings) {
  const std::vector<PriceChange> changes = price_changes(panel);
  if (changes.empty()) throw std::domain_error("no month-to-month price changes in the panel");
  const auto n = static_cast<Eigen::Index>(changes.size());
  Eigen::VectorXd y(n);
  Eigen::MatrixXd X(n, 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    y(k) = changes[static_cast<std::size_t>(k)].log_change;
    X(k, 0) = changes[static_cast<std::size_t>(k)].ends_in_90 ? 1.0 : 0.0;
  }
  std::vector<FixedEffectGrouping> groupings;
  for (PremiumEffect fe : fixed_effects) {
    std::vector<std::int64_t> keys;
    keys.reserve(changes.size());
    for (const PriceChange& c : changes) {
      switch (fe) {
        case PremiumEffect::Year: keys.push_back(c.year); break;
        case PremiumEffect::Month: keys.push_back(c.month); break;
        case PremiumEffect::Product: keys.push_back(c.product); break;
        case PremiumEffect::Store: keys.push_back(c.store); break;
      }
    }
    groupings.push_back(make_grouping(std::string(to_string(fe)), keys));
  }
  const std::vector<std::string> names{"ends_in_90"};
  const FixedEffectsFit fit = fit_fixed_effects(y, X, names, groupings, settings);
  return {fit.ols.coef(0), fit.ols.std_error(0), fit.intercept, n, fit.sweeps};
}

}  // namespace roundtax
