#include "roundtax/rounding_tax.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

namespace roundtax {

namespace {

struct Accumulator {
  std::int64_t sum = 0;
  std::int64_t square_sum = 0;
};

std::int64_t round_to_micro(long double agorot) { return std::llround(agorot * 1'000'000.0L); }

}  // namespace

int simulate_transaction(const EndingDistribution& residues, const BasketSizeDistribution& baskets,
                         RoundingRegime regime, std::uint64_t seed, std::uint64_t t) {
  CounterStream rng(seed, t);
  const int k = sample_basket(baskets, rng);
  int bill = 0;
  for (int i = 0; i < k; ++i) bill += residues.sample(rng);
  return residue_delta(bill % residues.modulus(), regime);
}

TaxEstimate simulate_rounding_tax(const StoreProfile& profile, const SimulationConfig& config) {
  if (config.n_transactions < 1) throw std::invalid_argument("n_transactions must be at least 1");
  if (config.workers < 1) throw std::invalid_argument("workers must be at least 1");

  TaxEstimate est;
  est.n = config.n_transactions;
  if (config.regime == RoundingRegime::None) return est;

  const EndingDistribution residues = profile.endings.collapse(granularity(config.regime));
  const auto n = static_cast<std::uint64_t>(config.n_transactions);
  const auto workers = static_cast<std::uint64_t>(std::min<std::int64_t>(config.workers, config.n_transactions));

  std::vector<Accumulator> parts(workers);
  const auto run = [&](std::uint64_t w) {
    const std::uint64_t begin = n * w / workers;
    const std::uint64_t end = n * (w + 1) / workers;
    Accumulator acc;
    for (std::uint64_t t = begin; t < end; ++t) {
      const int d = simulate_transaction(residues, profile.baskets, config.regime, config.seed, t);
      acc.sum += d;
      acc.square_sum += d * d;
    }
    parts[w] = acc;
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
  }
  for (const Accumulator& a : parts) {
    est.delta_sum += a.sum;
    est.delta_square_sum += a.square_sum;
  }

  const long double nn = static_cast<long double>(est.n);
  est.mean_micro = round_to_micro(static_cast<long double>(est.delta_sum) / nn);
  if (est.n > 1) {
    // sum of squared deviations, exact in integers: S2 - S1^2 / n
    const long double s1 = static_cast<long double>(est.delta_sum);
    const long double ss = static_cast<long double>(est.delta_square_sum) - s1 * s1 / nn;
    const long double variance = std::max(0.0L, ss / (nn - 1));
    est.std_error_micro = round_to_micro(std::sqrt(variance / nn));
  }
  return est;
}

}  // namespace roundtax
