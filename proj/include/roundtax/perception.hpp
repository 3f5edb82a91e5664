#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "roundtax/econometrics/panel.hpp"
#include "roundtax/money.hpp"

namespace roundtax {

/// Left-digit bias theta (in millionths) and focal ending delta (in agorot).
struct BiasParams {
  std::int64_t theta_ppm = 0;  // 0 ..= 1'000'000
  int focal_agorot = 0;        // 0 ..= 99

  /// Rounds theta to the nearest millionth. Throws std::domain_error outside the ranges.
  static BiasParams make(double theta, int focal_agorot = 0);
  double theta() const { return static_cast<double>(theta_ppm) * 1e-6; }
};

/// A perceived price held exactly in units of 1e-8 NIS (a millionth of an agora).
struct PerceivedPrice {
  static constexpr std::int64_t kUnitsPerAgora = 1'000'000;

  std::int64_t units = 0;
  /// The ending lies below the focal ending, so the formula perceives more than the posted price.
  bool above_true_price = false;

  double nis() const { return static_cast<double>(units) / (100.0 * kUnitsPerAgora); }
  /// Nearest agora, halves away from zero.
  Money rounded() const;
  /// Fixed decimal NIS, `places` <= 8, rounded half away from zero.
  std::string to_string(int places = 2) const;
};

/// (1 - theta) p + theta (delta + floor(p)), evaluated as p - theta (ending - delta).
/// Throws std::domain_error for a negative price.
PerceivedPrice perceived_price(Money price, const BiasParams& params);

/// Smallest theta on a grid of `steps` + 1 points in [0, 1] at which the drop in
/// ln Q from `price90` (a 90-ending price) to `price90` + 10 agorot exceeds the
/// drop the elasticity alone implies, under ln Q = alpha + epsilon ln(p-hat).
/// Empty when no grid point qualifies.
std::optional<double> discontinuity_threshold(Money price90, int focal_agorot, double epsilon, int steps = 1000);

/// ln Q = alpha + b90 D90 + b00 D00 + b99 D99 + epsilon ln P.
struct ReducedFormPlan {
  double alpha = 0.0;
  double epsilon = -1.0;
  double beta90 = 0.0;
  double beta00 = 0.0;
  double beta99 = 0.0;
};

/// ln Q = alpha + epsilon ln(p-hat).
struct StructuralPlan {
  double alpha = 0.0;
  double epsilon = -1.0;
  BiasParams bias;
};

/// A weekly product-store panel whose prices cycle around each pair's modal
/// 99-ending price so that D99, D90 and D00 are all identified.
///
/// The first half of the weeks fall in `base_year`, the rest in `base_year + 1`.
/// Base-year prices repeat six weeks of M, two of M - 0.50 and two of M + 1.00.
/// Post-year prices cycle through M + 0.01, M - 0.09, M + 0.01, M - 0.09,
/// M + 0.91, M - 1.09, each held for two weeks. Every pair starts the cycles at
/// its own phase.
/// M is a 99-ending grid price (at least 1.99) plus 1 NIS for every store modulo 3.
struct SyntheticPanelSpec {
  int n_products = 50;
  int n_stores = 20;
  int n_weeks = 52;
  std::vector<Money> price_grid;
  std::variant<ReducedFormPlan, StructuralPlan> plan;
  double noise_sd = 0.0;
  double effect_sd = 0.0;  // sd of the planted fixed effects
  std::uint64_t seed = 0;
  int base_year = 2013;
  int n_chains = 3;
  int n_categories = 5;
};

/// Deterministic in (spec); the work splits over `workers` threads without
/// changing a single bit of the output.
/// Throws std::domain_error for an invalid spec or a grid without a usable 99-ending price.
DemandPanel generate_panel(const SyntheticPanelSpec& spec, int workers = 1);

/// Monthly prices with occasional changes. A change draws the 90-ending
/// indicator D with probability 1/2 and a log change of
/// base_change + beta D + noise, then snaps the price to the nearest 90-ending
/// price (D = 1) or to the nearest multiple of 10 agorot that does not end in 90.
struct PriceChangePanelSpec {
  int n_products = 100;
  int n_stores = 10;
  int n_months = 24;
  double change_probability = 0.3;
  double base_change = 0.05;
  double beta = 0.01;
  double noise_sd = 0.02;
  std::uint64_t seed = 0;
  int start_year = 2015;
};

MonthlyPanel generate_price_change_panel(const PriceChangePanelSpec& spec);

}  // namespace roundtax
