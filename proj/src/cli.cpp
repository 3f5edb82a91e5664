#include "roundtax/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roundtax/delimited.hpp"
#include "roundtax/distributions.hpp"
#include "roundtax/econometrics/demand.hpp"
#include "roundtax/penalty.hpp"
#include "roundtax/perception.hpp"
#include "roundtax/report.hpp"
#include "roundtax/rounding_tax.hpp"
#include "roundtax/scenario.hpp"

namespace roundtax {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::map<StoreType, Rational> parse_store_values(const std::string& text, const std::string& option) {
  std::map<StoreType, Rational> out;
  for (const std::string& item : split_fields(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError(option + ": expected store=value, got '" + item + "'");
    StoreType type{};
    Rational value;
    try {
      type = parse_store_type(split_fields(item.substr(0, eq), ',').at(0));
      value = parse_decimal(split_fields(item.substr(eq + 1), ',').at(0));
    } catch (const std::exception& e) {
      throw UsageError(option + ": " + e.what());
    }
    if (!out.emplace(type, value).second) throw UsageError(option + ": store type given twice");
  }
  if (out.empty()) throw UsageError(option + ": no values given");
  return out;
}

std::optional<Money> parse_cap(const std::string& text) {
  if (text == "none") return std::nullopt;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size() || v <= 0) throw std::invalid_argument("");
    return Money(v);
  } catch (const std::exception&) {
    throw UsageError("--price-cap-agorot: expected a positive integer or 'none', got '" + text + "'");
  }
}

std::string cap_label(const std::optional<Money>& cap) {
  return cap ? "prices below NIS " + cap->to_string() : "all prices (no cap)";
}

std::string nis_whole(const Rational& agorot) { return group_thousands(to_whole_nis(agorot).str()); }

std::string percent(const Rational& share, int places) { return to_decimal_string(share * 100, places); }

std::string micro(std::int64_t value) {
  const Rational r(value, 1'000'000);
  return to_decimal_string(r, 6);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path.string() + ": cannot open for writing");
  f << body;
}

struct Outputs {
  Report report;
  std::map<std::string, std::string> files;  // extra files for --out, by name
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------- simulate / oracle

struct SimOptions {
  std::string profiles;
  std::string regime = "nearest10";
  std::int64_t n = 10'000;
  std::uint64_t seed = 42;
  int workers = 1;
  bool compare = false;
};

SimulationConfig sim_config(const SimOptions& o) {
  if (o.n < 1) throw UsageError("--n must be at least 1");
  if (o.workers < 1) throw UsageError("--workers must be at least 1");
  return {o.n, o.seed, parse_regime(o.regime), o.workers};
}

Outputs cmd_simulate(const SimOptions& o) {
  const SimulationConfig config = sim_config(o);
  const auto profiles = load_profiles(o.profiles);
  ReportTable t("Monte Carlo rounding tax per cash transaction",
                {"store_type", "transactions", "mean_agorot", "std_error_agorot", "mean_nis"});
  for (const StoreProfile& p : profiles) {
    const TaxEstimate e = simulate_rounding_tax(p, config);
    t.add_row({std::string(to_string(p.store_type)), std::to_string(e.n), micro(e.mean_micro),
               micro(e.std_error_micro), to_decimal_string(Rational(e.mean_micro, 100'000'000), 6)});
  }
  t.add_note("regime " + o.regime + ", seed " + std::to_string(o.seed));
  Outputs out;
  out.report.tables.push_back(std::move(t));
  return out;
}

Outputs cmd_oracle(const SimOptions& o) {
  const RoundingRegime regime = parse_regime(o.regime);
  const auto profiles = load_profiles(o.profiles);
  std::vector<std::string> header{"store_type", "exact_agorot", "exact_nis"};
  if (o.compare) header.insert(header.end(), {"simulated_agorot", "std_error_agorot", "z", "within_3se"});
  ReportTable t("Exact expected rounding tax per cash transaction", header);
  for (const StoreProfile& p : profiles) {
    const Rational exact = exact_rounding_tax(p, regime);
    std::vector<std::string> row{std::string(to_string(p.store_type)), to_decimal_string(exact, 8),
                                 to_decimal_string(exact / 100, 8)};
    if (o.compare) {
      const TaxEstimate e = simulate_rounding_tax(p, sim_config(o));
      const double gap = e.mean_agorot() - to_double(exact);
      const double se = e.std_error_agorot();
      row.push_back(micro(e.mean_micro));
      row.push_back(micro(e.std_error_micro));
      row.push_back(se > 0 ? fixed(gap / se, 3) : "n/a");
      row.push_back(std::abs(gap) <= 3 * se ? "yes" : "no");
    }
    t.add_row(std::move(row));
  }
  t.add_note("regime " + o.regime + (o.compare ? ", seed " + std::to_string(o.seed) + ", n " + std::to_string(o.n) : ""));
  Outputs out;
  out.report.tables.push_back(std::move(t));
  return out;
}

// ---------------------------------------------------------------- scenario

struct ScenarioOptions {
  std::string profiles;
  std::string taxes;  // NIS per transaction, store=value list
  std::string regime = "nearest10";
  std::string cash_share = "0.25";
};

Outputs cmd_scenario(const ScenarioOptions& o) {
  const auto profiles = load_profiles(o.profiles);
  StoreTaxes taxes;
  std::string source;
  if (!o.taxes.empty()) {
    for (const auto& [type, nis] : parse_store_values(o.taxes, "--taxes")) taxes[type] = nis * 100;
    source = "taxes given on the command line";
  } else {
    const RoundingRegime regime = parse_regime(o.regime);
    for (const StoreProfile& p : profiles) taxes[p.store_type] = exact_rounding_tax(p, regime);
    source = "exact expected taxes of the profiles under " + o.regime;
  }
  Rational share;
  try {
    share = parse_rational(o.cash_share);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--cash-share: ") + e.what());
  }
  if (share < 0 || share > 1) throw UsageError("--cash-share must lie in [0, 1]");

  const CashShareScenario equal = uniform_scenario(profiles, share);
  const TaxTable base = total_tax(profiles, taxes, equal);
  const ExtremeScenarios ext = extreme_scenarios(profiles, taxes, equal.aggregate_target);

  ReportTable t("Annual rounding tax (NIS)", {"store_type", "avg_tax_nis", "revenue_share_pct", "transactions",
                                              "equal_share_total", "max_total", "min_total"});
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const StoreProfile& p = profiles[i];
    t.add_row({std::string(to_string(p.store_type)), to_decimal_string(taxes.at(p.store_type) / 100, 6),
               percent(p.revenue_share, 3), group_thousands(std::to_string(p.annual_transactions)),
               nis_whole(base.rows[i].total), nis_whole(ext.max_table.rows[i].total),
               nis_whole(ext.min_table.rows[i].total)});
  }
  std::int64_t transactions = 0;
  for (const StoreProfile& p : profiles) transactions += p.annual_transactions;
  t.add_row({"total", "", "100.000", group_thousands(std::to_string(transactions)), nis_whole(base.grand_total),
             nis_whole(ext.max_table.grand_total), nis_whole(ext.min_table.grand_total)});
  t.add_note("cash share " + to_decimal_string(share * 100, 3) + "% of revenue; " + source);

  ReportTable s("Cash share of transactions by scenario (%)", {"store_type", "equal", "max", "min"});
  for (const StoreProfile& p : profiles) {
    s.add_row({std::string(to_string(p.store_type)), percent(equal.shares.at(p.store_type), 3),
               percent(ext.max_scenario.shares.at(p.store_type), 3),
               percent(ext.min_scenario.shares.at(p.store_type), 3)});
  }
  Outputs out;
  out.report.tables.push_back(std::move(t));
  out.report.tables.push_back(std::move(s));
  return out;
}

// ---------------------------------------------------------------- estimate

struct EstimateOptions {
  std::string panel;
  std::vector<std::string> coefficients;
  std::string monthly;
  std::vector<std::string> premium_fe{"year", "month"};
  int base_year = 2013;
  int post_year = 2014;
  std::vector<std::string> fe{"product_store", "cat_year", "cat_month", "chain"};
  std::string restriction = "both-endings";
  std::string price_cap = "none";
  std::optional<int> before_year;
  int min_weeks = 1;
  bool no_d99 = false;
};

std::string theta_cell(const std::optional<double>& theta, int places) {
  return theta ? fixed(*theta, places) : "n/a";
}

Outputs cmd_estimate(const EstimateOptions& o) {
  if (o.panel.empty() && o.coefficients.empty() && o.monthly.empty()) {
    throw UsageError("estimate needs --panel, --monthly or --coefficients");
  }
  Outputs out;

  if (!o.coefficients.empty()) {
    ReportTable t("Left-digit bias from coefficients",
                  {"column", "beta90", "beta00", "epsilon", "mean_price", "theta", "theta_2dp"});
    int column = 1;
    for (const std::string& quad : o.coefficients) {
      const auto f = split_fields(quad, ',');
      if (f.size() != 4) throw UsageError("--coefficients: expected beta90,beta00,epsilon,mean_price, got '" + quad + "'");
      double v[4];
      for (int i = 0; i < 4; ++i) {
        try {
          std::size_t used = 0;
          v[i] = std::stod(f[static_cast<std::size_t>(i)], &used);
          if (used != f[static_cast<std::size_t>(i)].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
          throw UsageError("--coefficients: '" + f[static_cast<std::size_t>(i)] + "' is not a number");
        }
      }
      const double theta = compute_theta(v[0], v[1], v[2], v[3]);
      t.add_row({"(" + std::to_string(column++) + ")", f[0], f[1], f[2], f[3], fixed(theta, 4), fixed(theta, 2)});
    }
    out.report.tables.push_back(std::move(t));
  }

  if (!o.panel.empty()) {
    if (o.min_weeks < 1) throw UsageError("--min-weeks must be at least 1");
    DemandSpecification spec;
    spec.fixed_effects.clear();
    for (const std::string& token : o.fe) spec.fixed_effects.insert(parse_fixed_effect(token));
    spec.restrictions.pairs = parse_restriction(o.restriction);
    spec.restrictions.price_cap = parse_cap(o.price_cap);
    spec.restrictions.before_year = o.before_year;
    spec.include_d99 = !o.no_d99;

    DemandPanel panel = load_demand_panel(o.panel);
    if (o.min_weeks > 1) panel = filter_durable_prices(panel, o.min_weeks);
    const DummyAssignment dummies = assign_dummies(panel, o.base_year, o.post_year);
    const RegressionResult r = estimate_demand(panel, dummies, spec);

    ReportTable t("Left-digit bias estimate", {"quantity", "estimate", "std_error"});
    t.add_row({"beta90", fixed(r.beta90, 6), fixed(r.se90, 6)});
    t.add_row({"beta00", fixed(r.beta00, 6), fixed(r.se00, 6)});
    if (r.beta99) t.add_row({"beta99", fixed(*r.beta99, 6), fixed(*r.se99, 6)});
    t.add_row({"epsilon", fixed(r.epsilon, 6), fixed(r.se_epsilon, 6)});
    t.add_row({"mean_price_nis", fixed(r.mean_price, 4), ""});
    t.add_row({"theta", theta_cell(r.theta_hat, 4), ""});
    t.add_row({"theta_2dp", theta_cell(r.theta_hat, 2), ""});
    t.add_row({"observations", std::to_string(r.n_observations), ""});
    t.add_row({"product_store_pairs", std::to_string(r.n_pairs), ""});
    std::string fes;
    for (FixedEffect fe : spec.fixed_effects) fes += (fes.empty() ? "" : ",") + std::string(to_string(fe));
    t.add_note("fixed effects: " + (fes.empty() ? std::string("none") : fes) + "; restriction " + o.restriction +
               "; " + cap_label(spec.restrictions.price_cap) +
               (o.before_year ? "; years before " + std::to_string(*o.before_year) : "") +
               (o.min_weeks > 1 ? "; prices lasting " + std::to_string(o.min_weeks) + "+ weeks" : "") +
               (spec.include_d99 ? "" : "; no D99 dummy"));
    t.add_note("classical standard errors; " + std::to_string(r.sweeps) + " demeaning sweeps");
    out.report.tables.push_back(std::move(t));
  }

  if (!o.monthly.empty()) {
    std::set<PremiumEffect> effects;
    for (const std::string& token : o.premium_fe) effects.insert(parse_premium_effect(token));
    const MonthlyPanel monthly = load_monthly_panel(o.monthly);
    const PremiumResult r = price_change_premium(monthly, effects);
    ReportTable t("Price-change premium of 90-ending prices", {"quantity", "estimate", "std_error"});
    t.add_row({"ends_in_90", fixed(r.beta, 6), fixed(r.std_error, 6)});
    t.add_row({"observations", std::to_string(r.n_observations), ""});
    std::string fes;
    for (PremiumEffect fe : effects) fes += (fes.empty() ? "" : ",") + std::string(to_string(fe));
    t.add_note("fixed effects: " + (fes.empty() ? std::string("none") : fes));
    out.report.tables.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOptions {
  std::string observations;
  std::string price_cap;
  int base_year = 2013;
  int compare_year = 2021;
  std::string volumes;  // thousands of units
  std::string means_after;
  std::string means_before;
  std::string rounding = "one-decimal";
};

PennyStats stats_for_year(const PennyStats& all, int year) {
  PennyStats out;
  out.price_cap = all.price_cap;
  for (const PennyGroup& g : all.groups) {
    if (g.key.year == year) out.groups.push_back(g);
  }
  return out;
}

PennyStats stats_from_means(const std::map<StoreType, Rational>& means, std::optional<Money> cap) {
  PennyStats out;
  out.price_cap = cap;
  for (const auto& [type, mean] : means) out.groups.push_back({{type, std::nullopt}, mean, 0});
  return out;
}

Outputs cmd_analyze(const AnalyzeOptions& o) {
  const std::optional<Money> cap = parse_cap(o.price_cap);
  PenaltyRounding rounding{};
  if (o.rounding == "one-decimal") {
    rounding = PenaltyRounding::OneDecimal;
  } else if (o.rounding == "exact") {
    rounding = PenaltyRounding::Exact;
  } else {
    throw UsageError("--rounding must be one-decimal or exact");
  }
  const bool means_mode = !o.means_after.empty() || !o.means_before.empty();
  if (means_mode == !o.observations.empty()) {
    throw UsageError("analyze needs either --observations or both --means-after and --means-before");
  }
  if (means_mode && (o.means_after.empty() || o.means_before.empty() || o.volumes.empty())) {
    throw UsageError("--means-after and --means-before need each other and --volumes");
  }

  Outputs out;
  PennyStats after, before;
  if (!means_mode) {
    const auto obs = load_price_observations(o.observations);
    if (obs.empty()) throw std::domain_error(o.observations + ": no price observations");
    const GroupBy by{true, true};
    const EndingHistogram hist = ending_histogram(obs, by);
    const PennyStats pennies = avg_pennies(obs, cap, by);
    std::map<GroupKey, const PennyGroup*> penny_of;
    for (const PennyGroup& g : pennies.groups) penny_of[g.key] = &g;

    ReportTable t("Price endings by store type and year",
                  {"store_type", "year", "prices", "share_9_ending_pct", "share_90_99_pct", "share_0_ending_pct",
                   "prices_under_cap", "avg_agorot_under_cap"});
    for (const auto& [key, counts] : hist.groups()) {
      const auto it = penny_of.find(key);
      t.add_row({std::string(to_string(*key.store_type)), std::to_string(*key.year), std::to_string(hist.total(key)),
                 percent(share_with_last_digit(hist, key, 9), 2), percent(share_in_range(hist, key, 90, 99), 2),
                 percent(share_with_last_digit(hist, key, 0), 2),
                 it == penny_of.end() ? "0" : std::to_string(it->second->n_prices),
                 it == penny_of.end() ? "n/a" : to_decimal_string(it->second->mean_agorot, 2)});
    }
    t.add_note(cap_label(cap) + " for the agorot averages");
    for (const GroupKey& key : pennies.omitted) {
      const std::string w = "group " + to_string(key) + " has no price under the cap and is omitted";
      t.add_note("warning: " + w);
      out.warnings.push_back(w);
    }
    out.report.tables.push_back(std::move(t));

    std::vector<std::string> header{"store_type"};
    for (int s = 0; s < 10; ++s) header.push_back(std::to_string(s) + "0-" + std::to_string(s) + "9");
    ReportTable seg("Change in 10-agora segment shares, " + std::to_string(o.base_year) + " to " +
                        std::to_string(o.compare_year) + " (%)",
                    header);
    for (StoreType type : kStoreTypes) {
      const GroupKey a{type, o.base_year};
      const GroupKey b{type, o.compare_year};
      if (!hist.groups().contains(a) || !hist.groups().contains(b)) continue;
      std::vector<std::string> row{std::string(to_string(type))};
      for (const auto& change : segment_change(hist, a, hist, b)) {
        row.push_back(change ? to_decimal_string(*change, 1) : "undefined");
      }
      seg.add_row(std::move(row));
    }
    out.report.tables.push_back(std::move(seg));

    std::vector<PlotSeries> share_series, penny_series;
    for (const auto& [type, points] : year_series(hist, [](const EndingHistogram& h, const GroupKey& k) {
           return share_in_range(h, k, 90, 99);
         })) {
      share_series.push_back({std::string(display_name(type)), points});
    }
    std::map<StoreType, std::map<int, double>> penny_points;
    for (const PennyGroup& g : pennies.groups) penny_points[*g.key.store_type][*g.key.year] = to_double(g.mean_agorot);
    for (const auto& [type, points] : penny_points) penny_series.push_back({std::string(display_name(type)), points});
    out.files["share_90_99.svg"] = svg_line_plot("Share of prices ending in 90-99", "share", share_series);
    out.files["avg_agorot.svg"] =
        svg_line_plot("Average agorot per price, " + cap_label(cap), "agorot", penny_series);

    after = stats_for_year(pennies, o.compare_year);
    before = stats_for_year(pennies, o.base_year);
  } else {
    after = stats_from_means(parse_store_values(o.means_after, "--means-after"), cap);
    before = stats_from_means(parse_store_values(o.means_before, "--means-before"), cap);
  }

  if (!o.volumes.empty()) {
    std::map<StoreType, Rational> volumes;
    for (const auto& [type, thousands] : parse_store_values(o.volumes, "--volumes")) volumes[type] = thousands * 1000;
    const PenaltyTable table = inattention_penalty(after, before, volumes, rounding);
    ReportTable t("Inattention penalty, " + std::to_string(o.compare_year) + " vs " + std::to_string(o.base_year),
                  {"store_type", "agorot_after", "agorot_before", "difference", "volume_thousands", "total_nis"});
    BigInt sum_of_rows = 0;
    const int places = rounding == PenaltyRounding::OneDecimal ? 1 : 4;
    for (const PenaltyRow& row : table.rows) {
      sum_of_rows += to_whole_nis(row.total);
      t.add_row({std::string(to_string(row.store_type)), to_decimal_string(row.mean_after, places),
                 to_decimal_string(row.mean_before, places), to_decimal_string(row.difference, places),
                 to_decimal_string(row.volume / 1000, 1), nis_whole(row.total)});
    }
    t.add_row({"total", "", "", "", "", nis_whole(table.grand_total)});
    if (sum_of_rows != to_whole_nis(table.grand_total)) {
      t.add_note("rounded rows sum to " + group_thousands(sum_of_rows.str()) + "; the total rounds the exact sum");
    }
    t.add_note(cap_label(cap) + "; means " + (rounding == PenaltyRounding::OneDecimal ? "rounded to 0.1 agora" : "unrounded"));
    out.report.tables.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
  std::string kind = "panel";
  std::string output;
  std::uint64_t seed = 42;
  int workers = 1;
  // panel
  int products = 50;
  int stores = 20;
  int weeks = 52;
  std::string mode = "reduced";
  double alpha = 2.0;
  double epsilon = -0.65;
  double beta90 = 0.031;
  double beta00 = 0.020;
  double beta99 = 0.0;
  double theta = 0.2;
  int focal = 0;
  double noise_sd = 0.1;
  double effect_sd = 0.0;
  int base_year = 2013;
  std::string price_grid = "2.99,4.99,7.99,9.99,12.99,14.99,17.99,19.99";
  // monthly
  int months = 24;
  double change_probability = 0.3;
  double premium = 0.01;
  // observations
  std::string profiles;
  int first_year = 2012;
  int last_year = 2021;
  int post_year = 2014;
  int per_group = 2000;
  int max_price_nis = 30;
};

std::vector<PriceObservation> generate_observations(const GenerateOptions& o) {
  if (o.profiles.empty()) throw UsageError("generate --kind observations needs --profiles");
  if (o.first_year > o.last_year || o.per_group < 1 || o.max_price_nis < 2) {
    throw UsageError("need first-year <= last-year, per-group >= 1 and max-price-nis >= 2");
  }
  const auto profiles = load_profiles(o.profiles);
  std::vector<PriceObservation> obs;
  for (int year = o.first_year; year <= o.last_year; ++year) {
    for (const StoreProfile& p : profiles) {
      const auto group = static_cast<std::uint64_t>((year - o.first_year) * 3 + static_cast<int>(p.store_type));
      for (int j = 0; j < o.per_group; ++j) {
        CounterStream rng(o.seed, (group << 32) | static_cast<std::uint64_t>(j));
        const std::int64_t whole = 1 + rng.next_u32() % static_cast<std::uint32_t>(o.max_price_nis - 1);
        int ending = p.endings.modulus() == 100 ? p.endings.sample(rng) : 0;
        if (year >= o.post_year) ending = ending > 90 ? 90 : (ending + 9) / 10 * 10;
        std::int64_t agorot = whole * 100 + ending;
        obs.push_back({std::string(to_string(p.store_type)) + "-" + std::to_string(j % 25), p.store_type,
                       "P" + std::to_string(j), Date{year, 6, 15}, Money(agorot)});
      }
    }
  }
  return obs;
}

Outputs cmd_generate(const GenerateOptions& o) {
  if (o.workers < 1) throw UsageError("--workers must be at least 1");
  std::size_t records = 0;
  if (o.kind == "panel") {
    SyntheticPanelSpec spec;
    spec.n_products = o.products;
    spec.n_stores = o.stores;
    spec.n_weeks = o.weeks;
    for (const std::string& p : split_fields(o.price_grid, ',')) {
      try {
        spec.price_grid.push_back(parse_money(p));
      } catch (const std::exception& e) {
        throw UsageError("--price-grid: " + std::string(e.what()));
      }
    }
    if (o.mode == "reduced") {
      spec.plan = ReducedFormPlan{o.alpha, o.epsilon, o.beta90, o.beta00, o.beta99};
    } else if (o.mode == "structural") {
      spec.plan = StructuralPlan{o.alpha, o.epsilon, BiasParams::make(o.theta, o.focal)};
    } else {
      throw UsageError("--mode must be reduced or structural");
    }
    spec.noise_sd = o.noise_sd;
    spec.effect_sd = o.effect_sd;
    spec.seed = o.seed;
    spec.base_year = o.base_year;
    const DemandPanel panel = generate_panel(spec, o.workers);
    write_demand_panel(o.output, panel);
    records = panel.records.size();
  } else if (o.kind == "monthly") {
    PriceChangePanelSpec spec;
    spec.n_products = o.products;
    spec.n_stores = o.stores;
    spec.n_months = o.months;
    spec.change_probability = o.change_probability;
    spec.beta = o.premium;
    spec.noise_sd = o.noise_sd;
    spec.seed = o.seed;
    const MonthlyPanel panel = generate_price_change_panel(spec);
    write_monthly_panel(o.output, panel);
    records = panel.records.size();
  } else if (o.kind == "observations") {
    const auto obs = generate_observations(o);
    write_price_observations(o.output, obs);
    records = obs.size();
  } else {
    throw UsageError("--kind must be panel, monthly or observations");
  }
  ReportTable t("Generated data", {"kind", "file", "records", "seed"});
  t.add_row({o.kind, fs::path(o.output).filename().string(), std::to_string(records), std::to_string(o.seed)});
  Outputs out;
  out.report.tables.push_back(std::move(t));
  return out;
}

std::string one_line(std::string text) {
  for (char& ch : text) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  while (!text.empty() && text.back() == ' ') text.pop_back();
  return text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cash-rounding and price-ending toolkit", "roundtax"};
  app.set_version_flag("--version", std::string(ROUNDTAX_VERSION));
  app.set_config("--config", "", "Flat key = value file; keys are namespaced by subcommand (simulate.seed = 7)");
  app.require_subcommand(1);

  std::string out_dir;
  const auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Directory for report.txt, report.csv and manifest.txt");
  };

  SimOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rounding tax per store type");
  auto* oracle = app.add_subcommand("oracle", "Exact rounding tax by modular convolution");
  for (auto* sub : {simulate, oracle}) {
    sub->add_option("--profiles", sim.profiles, "Store profile file")->required();
    sub->add_option("--regime", sim.regime, "nearest5 | nearest10 | none")->capture_default_str();
    sub->add_option("--n", sim.n, "Simulated transactions per store type")->capture_default_str();
    sub->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    sub->add_option("--workers", sim.workers, "Worker threads (results do not depend on it)")->capture_default_str();
    add_out(sub);
  }
  oracle->add_flag("--compare", sim.compare, "Also simulate and compare with the exact value");

  ScenarioOptions sc;
  auto* scenario = app.add_subcommand("scenario", "Annual totals and extreme cash-share scenarios");
  scenario->add_option("--profiles", sc.profiles, "Store profile file")->required();
  scenario->add_option("--taxes", sc.taxes, "NIS per transaction, e.g. supermarkets=0.0075,small_groceries=0.0058");
  scenario->add_option("--regime", sc.regime, "Regime for exact taxes when --taxes is absent")->capture_default_str();
  scenario->add_option("--cash-share", sc.cash_share, "Revenue-weighted cash share")->capture_default_str();
  add_out(scenario);

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Left-digit bias regressions");
  estimate->add_option("--panel", est.panel, "Weekly demand panel");
  estimate->add_option("--coefficients", est.coefficients, "beta90,beta00,epsilon,mean_price (repeatable)");
  estimate->add_option("--monthly", est.monthly, "Monthly price panel for the price-change premium");
  estimate->add_option("--premium-fe", est.premium_fe, "year,month,product,store")->delimiter(',')->capture_default_str();
  estimate->add_option("--base-year", est.base_year)->capture_default_str();
  estimate->add_option("--post-year", est.post_year)->capture_default_str();
  estimate->add_option("--fe", est.fe, "product_store,cat_year,cat_month,chain")->delimiter(',')->capture_default_str();
  estimate->add_option("--restriction", est.restriction, "both-endings | either-ending | none")->capture_default_str();
  estimate->add_option("--price-cap-agorot", est.price_cap, "Keep prices below this, or 'none'")->capture_default_str();
  estimate->add_option("--before-year", est.before_year, "Keep years before this");
  estimate->add_option("--min-weeks", est.min_weeks, "Keep prices lasting this many weeks")->capture_default_str();
  estimate->add_flag("--no-d99", est.no_d99, "Leave out the base-year modal-price dummy");
  add_out(estimate);

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Price-ending shares, agorot per price and the inattention penalty");
  analyze->add_option("--observations", an.observations, "Price observation file");
  analyze->add_option("--price-cap-agorot", an.price_cap, "Prices below this enter the averages, or 'none'")->required();
  analyze->add_option("--base-year", an.base_year, "Year before the regulation")->capture_default_str();
  analyze->add_option("--compare-year", an.compare_year, "Year after the regulation")->capture_default_str();
  analyze->add_option("--volumes", an.volumes, "Units sold in thousands, store=value list");
  analyze->add_option("--means-after", an.means_after, "Agorot per price after, store=value list");
  analyze->add_option("--means-before", an.means_before, "Agorot per price before, store=value list");
  analyze->add_option("--rounding", an.rounding, "one-decimal | exact")->capture_default_str();
  add_out(analyze);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Synthetic panels and price observations");
  generate->add_option("--kind", gen.kind, "panel | monthly | observations")->capture_default_str();
  generate->add_option("--output", gen.output, "File to write")->required();
  generate->add_option("--seed", gen.seed)->capture_default_str();
  generate->add_option("--workers", gen.workers)->capture_default_str();
  generate->add_option("--products", gen.products)->capture_default_str();
  generate->add_option("--stores", gen.stores)->capture_default_str();
  generate->add_option("--weeks", gen.weeks)->capture_default_str();
  generate->add_option("--mode", gen.mode, "reduced | structural")->capture_default_str();
  generate->add_option("--alpha", gen.alpha)->capture_default_str();
  generate->add_option("--epsilon", gen.epsilon)->capture_default_str();
  generate->add_option("--beta90", gen.beta90)->capture_default_str();
  generate->add_option("--beta00", gen.beta00)->capture_default_str();
  generate->add_option("--beta99", gen.beta99)->capture_default_str();
  generate->add_option("--theta", gen.theta)->capture_default_str();
  generate->add_option("--focal-agorot", gen.focal)->capture_default_str();
  generate->add_option("--noise-sd", gen.noise_sd)->capture_default_str();
  generate->add_option("--effect-sd", gen.effect_sd)->capture_default_str();
  generate->add_option("--base-year", gen.base_year)->capture_default_str();
  generate->add_option("--price-grid", gen.price_grid, "Comma-separated NIS prices")->capture_default_str();
  generate->add_option("--months", gen.months)->capture_default_str();
  generate->add_option("--change-probability", gen.change_probability)->capture_default_str();
  generate->add_option("--premium", gen.premium, "Planted 90-ending premium")->capture_default_str();
  generate->add_option("--profiles", gen.profiles, "Profiles for --kind observations");
  generate->add_option("--first-year", gen.first_year)->capture_default_str();
  generate->add_option("--last-year", gen.last_year)->capture_default_str();
  generate->add_option("--post-year", gen.post_year)->capture_default_str();
  generate->add_option("--per-group", gen.per_group)->capture_default_str();
  generate->add_option("--max-price-nis", gen.max_price_nis)->capture_default_str();
  add_out(generate);

  const auto fail = [&](const char* kind, const std::string& message, int code) {
    err << "roundtax: error: " << kind << ": " << one_line(message) << '\n';
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << ROUNDTAX_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    Outputs result;
    std::string command;
    if (simulate->parsed()) {
      command = "simulate";
      result = cmd_simulate(sim);
    } else if (oracle->parsed()) {
      command = "oracle";
      result = cmd_oracle(sim);
    } else if (scenario->parsed()) {
      command = "scenario";
      result = cmd_scenario(sc);
    } else if (estimate->parsed()) {
      command = "estimate";
      result = cmd_estimate(est);
    } else if (analyze->parsed()) {
      command = "analyze";
      result = cmd_analyze(an);
    } else {
      command = "generate";
      result = cmd_generate(gen);
    }

    for (const std::string& w : result.warnings) err << "roundtax: warning: " << w << '\n';
    const std::string text = result.report.text();
    out << text;

    if (!out_dir.empty()) {
      const fs::path dir(out_dir);
      fs::create_directories(dir);
      write_file(dir / "report.txt", text);
      write_file(dir / "report.csv", result.report.csv());
      for (const auto& [name, body] : result.files) write_file(dir / name, body);
      std::ostringstream manifest;
      manifest << "tool = roundtax " << ROUNDTAX_VERSION << '\n';
      manifest << "command = " << command << '\n';
      manifest << "timestamp = " << utc_timestamp() << '\n';
      manifest << "argv =";
      for (int i = 1; i < argc; ++i) manifest << ' ' << argv[i];
      manifest << "\n\n# resolved configuration\n" << app.config_to_str(true, false);
      write_file(dir / "manifest.txt", manifest.str());
    }
    return 0;
  } catch (const UsageError& e) {
    return fail("usage", e.what(), 2);
  } catch (const ParseError& e) {
    return fail("input", e.what(), 1);
  } catch (const std::domain_error& e) {
    return fail("domain", e.what(), 1);
  } catch (const std::invalid_argument& e) {
    return fail("domain", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
}

}  // namespace roundtax
