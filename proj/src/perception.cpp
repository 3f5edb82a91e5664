#include "roundtax/perception.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "roundtax/philox.hpp"

namespace roundtax {

BiasParams BiasParams::make(double theta, int focal_agorot) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::domain_error("theta must lie in [0, 1]");
  if (focal_agorot < 0 || focal_agorot > 99) throw std::domain_error("focal ending must lie in 0..99 agorot");
  return {std::llround(theta * 1e6), focal_agorot};
}

Money PerceivedPrice::rounded() const {
  const std::int64_t half = kUnitsPerAgora / 2;
  return Money(units >= 0 ? (units + half) / kUnitsPerAgora : -((-units + half) / kUnitsPerAgora));
}

std::string PerceivedPrice::to_string(int places) const {
  if (places < 0 || places > 8) throw std::invalid_argument("places must be in 0..8");
  std::int64_t step = 1;
  for (int i = places; i < 8; ++i) step *= 10;
  const std::int64_t magnitude = units < 0 ? -units : units;
  const std::int64_t scaled = (magnitude + step / 2) / step;
  std::int64_t unit = 1;
  for (int i = 0; i < places; ++i) unit *= 10;
  std::string out = (units < 0 && scaled != 0 ? "-" : "") + std::to_string(scaled / unit);
  if (places > 0) {
    char frac[16];
    std::snprintf(frac, sizeof frac, ".%0*lld", places, static_cast<long long>(scaled % unit));
    out += frac;
  }
  return out;
}

PerceivedPrice perceived_price(Money price, const BiasParams& params) {
  if (price.agorot() < 0) throw std::domain_error("perceived price of a negative amount");
  const std::int64_t gap = price.ending() - params.focal_agorot;
  PerceivedPrice out;
  out.units = price.agorot() * PerceivedPrice::kUnitsPerAgora - params.theta_ppm * gap;
  out.above_true_price = gap < 0 && params.theta_ppm > 0;
  return out;
}

std::optional<double> discontinuity_threshold(Money price90, int focal_agorot, double epsilon, int steps) {
  if (price90.ending() != 90) throw std::domain_error("discontinuity threshold needs a 90-ending price");
  if (!(epsilon < 0.0)) throw std::domain_error("demand must slope downward (epsilon < 0)");
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  const double elastic_gap = epsilon * (std::log(price90.to_nis()) - std::log((price90 + Money(10)).to_nis()));
  for (int i = 0; i <= steps; ++i) {
    const double theta = static_cast<double>(i) / steps;
    const BiasParams bias = BiasParams::make(theta, focal_agorot);
    const double gap = epsilon * (std::log(perceived_price(price90, bias).nis()) -
                                  std::log(perceived_price(price90 + Money(10), bias).nis()));
    if (gap > elastic_gap * (1 + 1e-12)) return theta;
  }
  return std::nullopt;
}

namespace {

constexpr std::uint64_t kEffectStreams = std::uint64_t{1} << 63;

/// One normal draw per (kind, index) from a stream family that never meets the per-record streams.
double planted_effect(std::uint64_t seed, std::uint64_t kind, std::uint64_t index, double sd) {
  if (sd == 0.0) return 0.0;
  CounterStream rng(seed, kEffectStreams | (kind << 48) | index);
  return sd * rng.next_normal();
}

std::string label(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04d", prefix, i);
  return buf;
}

void run_chunks(std::size_t n, int workers, const auto& body) {
  workers = std::max(1, workers);
  if (workers == 1 || n < 2) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> threads;
  const std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    threads.emplace_back([&body, begin, end = std::min(n, begin + chunk)] { body(begin, end); });
  }
}

}  // namespace

DemandPanel generate_panel(const SyntheticPanelSpec& spec, int workers) {
  if (spec.n_products < 1 || spec.n_stores < 1 || spec.n_chains < 1 || spec.n_categories < 1) {
    throw std::domain_error("panel needs at least one product, store, chain and category");
  }
  if (spec.n_weeks < 20) throw std::domain_error("panel needs at least 20 weeks so every dummy is identified");
  if (!(spec.noise_sd >= 0.0) || !(spec.effect_sd >= 0.0)) throw std::domain_error("standard deviations must be >= 0");
  const double epsilon = std::visit([](const auto& plan) { return plan.epsilon; }, spec.plan);
  if (!(epsilon < 0.0)) throw std::domain_error("demand must slope downward (epsilon < 0)");

  std::vector<Money> modal_grid;
  for (Money m : spec.price_grid) {
    if (m.ending() == 99 && m >= Money(199)) modal_grid.push_back(m);
  }
  std::sort(modal_grid.begin(), modal_grid.end());
  modal_grid.erase(std::unique(modal_grid.begin(), modal_grid.end()), modal_grid.end());
  if (modal_grid.empty()) {
    throw std::domain_error("price grid has no 99-ending price of at least 1.99 to serve as a modal price");
  }

  DemandPanel panel;
  for (int p = 0; p < spec.n_products; ++p) panel.products.intern(label("P", p));
  for (int s = 0; s < spec.n_stores; ++s) panel.stores.intern(label("S", s));
  for (int c = 0; c < spec.n_chains; ++c) panel.chains.intern(label("C", c));
  for (int k = 0; k < spec.n_categories; ++k) panel.categories.intern(label("K", k));

  const int base_weeks = spec.n_weeks / 2;
  const int post_weeks = spec.n_weeks - base_weeks;
  static constexpr std::int64_t kBaseCycle[] = {0, 0, 0, 0, 0, 0, -50, -50, 100, 100};
  static constexpr std::int64_t kPostCycle[] = {1, 1, -9, -9, 1, 1, -9, -9, 91, 91, -109, -109};

  const std::size_t n_pairs = static_cast<std::size_t>(spec.n_products) * static_cast<std::size_t>(spec.n_stores);
  panel.records.resize(n_pairs * static_cast<std::size_t>(spec.n_weeks));

  run_chunks(panel.records.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const auto week0 = static_cast<int>(idx % static_cast<std::size_t>(spec.n_weeks));
      const std::size_t pair = idx / static_cast<std::size_t>(spec.n_weeks);
      const int product = static_cast<int>(pair / static_cast<std::size_t>(spec.n_stores));
      const int store = static_cast<int>(pair % static_cast<std::size_t>(spec.n_stores));

      DemandRecord& r = panel.records[idx];
      r.product = product;
      r.store = store;
      r.chain = store % spec.n_chains;
      r.category = product % spec.n_categories;
      r.week = week0 + 1;
      const bool post = week0 >= base_weeks;
      const int week_in_year = post ? week0 - base_weeks : week0;
      r.year = spec.base_year + (post ? 1 : 0);
      r.month = 1 + week_in_year * 12 / (post ? post_weeks : base_weeks);

      const Money mode = modal_grid[static_cast<std::size_t>(product) % modal_grid.size()] + Money(100 * (store % 3));
      const int phase = product * 7 + store * 3;
      const std::int64_t offset = post ? kPostCycle[(week_in_year + phase) % 12] : kBaseCycle[(week_in_year + phase) % 10];
      r.price = mode + Money(offset);
      r.price_exact = true;

      double lnq = planted_effect(spec.seed, 0, pair, spec.effect_sd) +
                   planted_effect(spec.seed, 1, static_cast<std::uint64_t>(r.category) * 4096 + static_cast<std::uint64_t>(r.year), spec.effect_sd) +
                   planted_effect(spec.seed, 2, static_cast<std::uint64_t>(r.category) * 16 + static_cast<std::uint64_t>(r.month), spec.effect_sd) +
                   planted_effect(spec.seed, 3, static_cast<std::uint64_t>(r.chain), spec.effect_sd);
      if (const auto* rf = std::get_if<ReducedFormPlan>(&spec.plan)) {
        lnq += rf->alpha + rf->epsilon * std::log(r.price.to_nis());
        if (!post && offset == 0) lnq += rf->beta99;
        if (post && offset == -9) lnq += rf->beta90;
        if (post && offset == 1) lnq += rf->beta00;
      } else {
        const auto& st = std::get<StructuralPlan>(spec.plan);
        lnq += st.alpha + st.epsilon * std::log(perceived_price(r.price, st.bias).nis());
      }
      if (spec.noise_sd > 0.0) {
        CounterStream rng(spec.seed, idx);
        lnq += spec.noise_sd * rng.next_normal();
      }
      r.quantity = std::exp(lnq);
    }
  });
  return panel;
}

namespace {

/// Nearest price ending in 90 agorot; ties go down.
std::int64_t snap_to_90(double raw) {
  const auto base = static_cast<std::int64_t>(std::floor(raw / 100.0)) * 100 + 90;
  std::int64_t best = base;
  for (std::int64_t c : {base - 100, base + 100}) {
    if (std::abs(static_cast<double>(c) - raw) < std::abs(static_cast<double>(best) - raw)) best = c;
  }
  return best;
}

/// Nearest multiple of 10 agorot that does not end in 90; ties go down.
std::int64_t snap_to_other(double raw) {
  std::int64_t q = std::llround(raw / 10.0) * 10;
  if (q % 100 == 90) q = (raw - static_cast<double>(q - 10) <= static_cast<double>(q + 10) - raw) ? q - 10 : q + 10;
  return q;
}

}  // namespace

MonthlyPanel generate_price_change_panel(const PriceChangePanelSpec& spec) {
  if (spec.n_products < 1 || spec.n_stores < 1 || spec.n_months < 2) {
    throw std::domain_error("price-change panel needs a product, a store and two months");
  }
  if (!(spec.change_probability > 0.0 && spec.change_probability <= 1.0)) {
    throw std::domain_error("change probability must lie in (0, 1]");
  }
  if (!(spec.noise_sd >= 0.0)) throw std::domain_error("noise_sd must be >= 0");

  MonthlyPanel panel;
  for (int p = 0; p < spec.n_products; ++p) panel.products.intern(label("P", p));
  for (int s = 0; s < spec.n_stores; ++s) panel.stores.intern(label("S", s));
  for (int c = 0; c < 3; ++c) panel.chains.intern(label("C", c));
  for (int k = 0; k < 5; ++k) panel.categories.intern(label("K", k));

  for (int p = 0; p < spec.n_products; ++p) {
    for (int s = 0; s < spec.n_stores; ++s) {
      CounterStream rng(spec.seed, static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(spec.n_stores) +
                                       static_cast<std::uint64_t>(s));
      std::int64_t price = 20'000 + static_cast<std::int64_t>(rng.next_u32() % 4'001) * 10;
      for (int m = 0; m < spec.n_months; ++m) {
        if (m > 0 && rng.next_uniform() < spec.change_probability) {
          const bool d = rng.next_uniform() < 0.5;
          const double change = spec.base_change + (d ? spec.beta : 0.0) + spec.noise_sd * rng.next_normal();
          const double raw = static_cast<double>(price) * std::exp(change);
          const std::int64_t next = d ? snap_to_90(raw) : snap_to_other(raw);
          if (next > 0) price = next;
        }
        panel.records.push_back({p, s, s % 3, p % 5, spec.start_year + m / 12, m % 12 + 1, Money(price)});
      }
    }
  }
  return panel;
}

}  // namespace roundtax
