#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "roundtax/econometrics/fixed_effects.hpp"
#include "roundtax/econometrics/panel.hpp"

namespace roundtax {

enum class FixedEffect { ProductStore, CategoryYear, CategoryMonth, Chain };

std::string_view to_string(FixedEffect fe);
/// Accepts "product_store", "cat_year", "cat_month", "chain".
FixedEffect parse_fixed_effect(std::string_view token);

/// Which product-store pairs enter the demand regression.
enum class PairRestriction {
  BothEndings,   // base-year mode, and at least one D90 and one D00 record
  EitherEnding,  // base-year mode, and at least one D90 or one D00 record
  None,          // every pair
};

std::string_view to_string(PairRestriction r);
/// Accepts "both-endings", "either-ending", "none".
PairRestriction parse_restriction(std::string_view token);

struct SampleRestrictions {
  PairRestriction pairs = PairRestriction::BothEndings;
  std::optional<Money> price_cap;  // keep prices strictly below
  std::optional<int> before_year;  // keep years strictly before
};

struct DemandSpecification {
  std::set<FixedEffect> fixed_effects{FixedEffect::ProductStore, FixedEffect::CategoryYear,
                                      FixedEffect::CategoryMonth, FixedEffect::Chain};
  SampleRestrictions restrictions;
  bool include_d99 = true;
  AbsorptionSettings absorption;
};

struct RegressionResult {
  double beta90 = 0.0;
  double beta00 = 0.0;
  std::optional<double> beta99;
  double epsilon = 0.0;
  double intercept = 0.0;
  double se90 = 0.0;
  double se00 = 0.0;
  std::optional<double> se99;
  double se_epsilon = 0.0;
  std::int64_t n_observations = 0;
  std::int64_t n_pairs = 0;
  double mean_price = 0.0;  // NIS
  std::optional<double> theta_hat;  // absent when epsilon >= 0
  int sweeps = 0;
  std::int64_t absorbed_dof = 0;
  double sigma2 = 0.0;
};

/// Records kept by the restrictions: usable prices, price cap and year cutoff
/// first, then the pair criterion evaluated on what remains.
std::vector<std::size_t> select_sample(const DemandPanel& panel, const DummyAssignment& dummies,
                                       const SampleRestrictions& restrictions);

/// ln Q on D90, D00, [D99,] ln P (price in NIS) with the requested fixed effects absorbed.
/// Throws std::domain_error on an empty sample, RankDeficientError or ConvergenceError.
RegressionResult estimate_demand(const DemandPanel& panel, const DummyAssignment& dummies,
                                 const DemandSpecification& spec);

/// (beta90 - beta00) / (-epsilon) * mean_price. Throws std::domain_error when epsilon >= 0.
double compute_theta(double beta90, double beta00, double epsilon, double mean_price);
double compute_theta(const RegressionResult& result);

enum class PremiumEffect { Year, Month, Product, Store };

std::string_view to_string(PremiumEffect fe);
/// Accepts "year", "month", "product", "store".
PremiumEffect parse_premium_effect(std::string_view token);

struct PriceChange {
  int product = 0;
  int store = 0;
  int year = 0;
  int month = 0;
  double log_change = 0.0;
  bool ends_in_90 = false;  // post-change price
};

/// Consecutive-month pairs of a product-store whose price changed.
std::vector<PriceChange> price_changes(const MonthlyPanel& panel);

struct PremiumResult {
  double beta = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  std::int64_t n_observations = 0;
  int sweeps = 0;
};

/// Log price change on the 90-ending dummy with the requested fixed effects.
PremiumResult price_change_premium(const MonthlyPanel& panel, const std::set<PremiumEffect>& fixed_effects,
                                   const AbsorptionSettings& settings = {});

}  // namespace roundtax
