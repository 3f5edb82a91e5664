#pragma once

#include <cstdint>
#include <stdexcept>

#include "roundtax/distributions.hpp"
#include "roundtax/money.hpp"
#include "roundtax/rational.hpp"

namespace roundtax {

/// Circular convolution of two mass vectors over residues modulo their common size:
/// out[r] = sum_s a[s] * b[(r - s) mod g].
template <typename DerivedA, typename DerivedB>
Vector<typename DerivedA::Scalar> circular_convolve(const Eigen::MatrixBase<DerivedA>& a,
                                                    const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Eigen::Index g = a.size();
  if (b.size() != g) throw std::invalid_argument("circular_convolve: size mismatch");
  Vector<Scalar> out = Vector<Scalar>::Zero(g);
  for (Eigen::Index s = 0; s < g; ++s) {
    if (a(s) == Scalar(0)) continue;
    for (Eigen::Index t = 0; t < g; ++t) out((s + t) % g) += a(s) * b(t);
  }
  return out;
}

/// Distribution of the sum of `k` i.i.d. residues drawn from `d` (k-fold circular convolution).
template <typename Derived>
Vector<typename Derived::Scalar> convolution_power(const Eigen::MatrixBase<Derived>& d, int k) {
  using Scalar = typename Derived::Scalar;
  if (k < 0) throw std::invalid_argument("convolution_power: negative power");
  Vector<Scalar> out = Vector<Scalar>::Zero(d.size());
  out(0) = Scalar(1);
  for (int i = 0; i < k; ++i) out = circular_convolve(out, d);
  return out;
}

/// Largest basket size the convolution oracle accepts.
inline constexpr int kMaxOracleBasket = 10'000;

/// Expected rounding delta per transaction, in agorot, evaluated in `Scalar`.
///
/// Item endings are collapsed to residues modulo the regime granularity, the
/// bill residue of a k-item basket is the k-fold convolution of that
/// distribution, and the expectation is mixed over basket sizes.
template <typename Scalar>
Scalar expected_rounding_tax(const StoreProfile& profile, RoundingRegime regime) {
  const int g = granularity(regime);
  if (g == 1) return Scalar(0);
  if (profile.baskets.max_size() > kMaxOracleBasket) {
    throw std::domain_error("basket sizes above " + std::to_string(kMaxOracleBasket) + " are not supported");
  }
  const Vector<Scalar> item = profile.endings.collapse(g).mass().template cast<Scalar>();
  Vector<Scalar> delta(g);
  for (int r = 0; r < g; ++r) delta(r) = Scalar(residue_delta(r, regime));

  Scalar total(0);
  Vector<Scalar> bill = item;  // residue distribution of a 1-item basket
  for (int k = 1; k <= profile.baskets.max_size(); ++k) {
    const Rational& p = profile.baskets.mass(k);
    if (p != 0) total += static_cast<Scalar>(p) * bill.dot(delta);
    if (k < profile.baskets.max_size()) bill = circular_convolve(bill, item);
  }
  return total;
}

/// Exact expected rounding tax per transaction in agorot.
inline Rational exact_rounding_tax(const StoreProfile& profile, RoundingRegime regime) {
  return expected_rounding_tax<Rational>(profile, regime);
}

struct SimulationConfig {
  std::int64_t n_transactions = 10'000;
  std::uint64_t seed = 0;
  RoundingRegime regime = RoundingRegime::Nearest10;
  int workers = 1;
};

/// Sample mean of the per-transaction rounding delta with its standard error.
///
/// The integer sums are kept so that the mean is exact; the fixed-point fields
/// are in micro-agorot (1e-6 agora), rounded half away from zero.
struct TaxEstimate {
  std::int64_t n = 0;
  std::int64_t delta_sum = 0;          // agorot
  std::int64_t delta_square_sum = 0;   // agorot^2
  std::int64_t mean_micro = 0;
  std::int64_t std_error_micro = 0;

  Rational exact_mean() const { return Rational(delta_sum, n); }
  double mean_agorot() const { return static_cast<double>(mean_micro) * 1e-6; }
  double std_error_agorot() const { return static_cast<double>(std_error_micro) * 1e-6; }

  friend bool operator==(const TaxEstimate&, const TaxEstimate&) = default;
};

/// Monte Carlo rounding tax: for each transaction t, draw a basket size and then
/// the endings of its items from substream (seed, t), and record the rounding
/// delta of the bill. The result does not depend on config.workers.
TaxEstimate simulate_rounding_tax(const StoreProfile& profile, const SimulationConfig& config);

/// Rounding delta of transaction `t` alone; exposed for reproducibility checks.
int simulate_transaction(const EndingDistribution& residues, const BasketSizeDistribution& baskets,
                         RoundingRegime regime, std::uint64_t seed, std::uint64_t t);

}  // namespace roundtax
