#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roundtax/money.hpp"
#include "roundtax/philox.hpp"
#include "roundtax/rational.hpp"

namespace roundtax {

enum class StoreType { SupermarketsAndDrugstores, SmallGroceries, ConvenienceStores };

inline constexpr std::array<StoreType, 3> kStoreTypes{
    StoreType::SupermarketsAndDrugstores, StoreType::SmallGroceries, StoreType::ConvenienceStores};

/// File token: "supermarkets", "small_groceries", "convenience".
std::string_view to_string(StoreType type);
/// Table heading: "Supermarkets and drugstores", ...
std::string_view display_name(StoreType type);
StoreType parse_store_type(std::string_view token);

namespace detail {

/// Probability masses over consecutive outcomes with an inverse-CDF sampler.
/// Masses are exact; the cumulative table used for sampling is in double.
class Pmf {
 public:
  Pmf() = default;
  explicit Pmf(Vector<Rational> mass);

  const Vector<Rational>& mass() const { return mass_; }
  Eigen::Index size() const { return mass_.size(); }

  /// Index of the outcome selected by u in [0, 1); outcomes are scanned in ascending order.
  Eigen::Index locate(double u) const;

 private:
  Vector<Rational> mass_;
  std::vector<double> cdf_;
};

}  // namespace detail

/// Probability of each price ending, i.e. price modulo `modulus` agorot.
/// modulus 100 is the two-digit view, 10 the last-digit view.
class EndingDistribution {
 public:
  /// Masses must be nonnegative and sum to 1 within 1e-12; they are then
  /// rescaled so the stored sum is exactly 1. The modulus is mass.size().
  explicit EndingDistribution(Vector<Rational> mass);

  static EndingDistribution uniform(int modulus);
  static EndingDistribution point_mass(int residue, int modulus);

  int modulus() const { return static_cast<int>(pmf_.size()); }
  const Vector<Rational>& mass() const { return pmf_.mass(); }
  const Rational& mass(int residue) const { return pmf_.mass()[residue]; }

  /// Folds residues into a coarser modulus that divides this one (100 -> 10 -> 5).
  EndingDistribution collapse(int modulus) const;

  int sample(CounterStream& rng) const { return static_cast<int>(pmf_.locate(rng.next_uniform())); }

 private:
  detail::Pmf pmf_;
};

/// Probability of each basket size k = 1..max_size().
class BasketSizeDistribution {
 public:
  /// mass[i] is the probability of a basket of i + 1 items.
  explicit BasketSizeDistribution(Vector<Rational> mass);

  static BasketSizeDistribution point_mass(int size);

  int max_size() const { return static_cast<int>(pmf_.size()); }
  const Vector<Rational>& mass() const { return pmf_.mass(); }
  const Rational& mass(int size) const { return pmf_.mass()[size - 1]; }

  int sample(CounterStream& rng) const { return static_cast<int>(pmf_.locate(rng.next_uniform())) + 1; }

 private:
  detail::Pmf pmf_;
};

/// Draws a basket size by inverse CDF over ascending k, consuming one uniform.
inline int sample_basket(const BasketSizeDistribution& dist, CounterStream& rng) { return dist.sample(rng); }

struct StoreProfile {
  StoreType store_type;
  EndingDistribution endings;
  BasketSizeDistribution baskets;
  std::int64_t annual_transactions;
  Rational revenue_share;
};

/// Published revenue shares are rounded percentages and may miss 1 by up to
/// this much; such sets are rescaled to sum to exactly 1.
inline constexpr double kRevenueShareSlack = 0.005;

/// Checks one profile per store type, positive transaction counts and shares
/// in [0, 1], then rescales the revenue shares to sum to exactly 1.
/// Throws std::invalid_argument when the shares miss 1 by more than kRevenueShareSlack.
void normalize_profile_set(std::vector<StoreProfile>& profiles);

/// Reads the profile file:
///   store_type, ending, residue(0-99), mass
///   store_type, basket, size(>=1), mass
///   store_type, meta, annual_transactions, revenue_share
/// Profiles come back in kStoreTypes order. Throws ParseError naming line and field.
std::vector<StoreProfile> load_profiles(const std::string& path);

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;
  friend auto operator<=>(const Date&, const Date&) = default;
};

Date parse_iso_date(std::string_view text);

struct PriceObservation {
  std::string store_id;
  StoreType store_type;
  std::string product_id;
  Date date;
  Money price;
};

/// Reads `store_id, store_type, product_id, date, price_agorot`; a header row is optional.
std::vector<PriceObservation> load_price_observations(const std::string& path);
void write_price_observations(const std::string& path, std::span<const PriceObservation> observations);

/// Share of prices at each residue modulo `modulus` (10 or 100).
/// Throws std::domain_error on an empty input or a negative price.
EndingDistribution empirical_ending_distribution(std::span<const Money> prices, int modulus);
EndingDistribution empirical_ending_distribution(std::span<const PriceObservation> observations, int modulus);

/// Total-variation distance between two distributions over the same modulus.
double total_variation(const EndingDistribution& a, const EndingDistribution& b);

}  // namespace roundtax
