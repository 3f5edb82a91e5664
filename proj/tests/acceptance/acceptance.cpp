// One line per acceptance criterion: "criterion N: PASS|FAIL  <detail>".
// With --criterion N only that criterion runs; the exit code is nonzero when any run criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "roundtax/econometrics/demand.hpp"
#include "roundtax/penalty.hpp"
#include "roundtax/perception.hpp"
#include "roundtax/rounding_tax.hpp"
#include "roundtax/scenario.hpp"
#include "test_support.hpp"

namespace roundtax {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::ostringstream failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures << " [" << what << "]";
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// Rounding rules.
void criterion1(Outcome& o) {
  const auto start = Clock::now();
  struct Example {
    const char* bill;
    RoundingRegime regime;
    const char* paid;
  };
  const Example examples[] = {{"9.42", RoundingRegime::Nearest5, "9.40"},  {"9.45", RoundingRegime::Nearest5, "9.45"},
                              {"9.48", RoundingRegime::Nearest5, "9.50"},  {"9.42", RoundingRegime::Nearest10, "9.40"},
                              {"9.45", RoundingRegime::Nearest10, "9.50"}, {"9.48", RoundingRegime::Nearest10, "9.50"}};
  for (const auto& e : examples) {
    o.require(round_bill(parse_money(e.bill), e.regime) == parse_money(e.paid),
              std::string(e.bill) + " under " + std::string(to_string(e.regime)));
  }
  // Truth table: 10-agora rule sends 1..4 down and 5..9 up; 5-agora rule sends 1,2 down and 3,4 up.
  const int ten[] = {0, -1, -2, -3, -4, 5, 4, 3, 2, 1};
  const int five[] = {0, -1, -2, 2, 1};
  for (int r = 0; r < 10; ++r) o.require(residue_delta(r, RoundingRegime::Nearest10) == ten[r], "nearest10 residue " + std::to_string(r));
  for (int r = 0; r < 5; ++r) o.require(residue_delta(r, RoundingRegime::Nearest5) == five[r], "nearest5 residue " + std::to_string(r));
  for (std::int64_t a = 0; a < 10'000; ++a) {
    const Money m(a);
    if (rounding_delta(m, RoundingRegime::Nearest10).agorot() != ten[a % 10] ||
        rounding_delta(m, RoundingRegime::Nearest5).agorot() != five[a % 5]) {
      o.require(false, "bill " + m.to_string());
      break;
    }
  }
  const double t = seconds_since(start);
  o.require(t < 1.0, "runtime");
  o.detail << "6 examples, residue tables, 10,000 bills; " << fmt("%.3f s", t);
}

Vector<Rational> enumerate_residues(const Vector<Rational>& item, int k) {
  const int g = static_cast<int>(item.size());
  Vector<Rational> out = Vector<Rational>::Zero(g);
  int combos = 1;
  for (int i = 0; i < k; ++i) combos *= g;
  for (int c = 0; c < combos; ++c) {
    Rational p = 1;
    int sum = 0;
    for (int i = 0, rest = c; i < k; ++i, rest /= g) {
      p *= item[rest % g];
      sum += rest % g;
    }
    out[sum % g] += p;
  }
  return out;
}

// Oracle equivalence.
void criterion2(Outcome& o) {
  const auto start = Clock::now();
  constexpr int kProfiles = 20;
  constexpr int kSeeds = 100;
  constexpr std::int64_t kN = 100'000;
  int exact_mismatch = 0;
  int passed = 0;
  int trials = 0;
  for (int p = 0; p < kProfiles; ++p) {
    const StoreProfile profile = testing::random_profile(1000 + static_cast<std::uint64_t>(p), 2 + p % 4);
    const RoundingRegime regime = p % 2 == 0 ? RoundingRegime::Nearest10 : RoundingRegime::Nearest5;
    const auto item = profile.endings.collapse(10).mass();
    for (int k = 1; k <= 4; ++k) exact_mismatch += convolution_power(item, k) != enumerate_residues(item, k);

    const double exact = to_double(exact_rounding_tax(profile, regime));
    for (int s = 0; s < kSeeds; ++s) {
      const TaxEstimate est = simulate_rounding_tax(profile, {kN, static_cast<std::uint64_t>(s), regime, 1});
      const double se = std::sqrt(to_double(Rational(est.delta_square_sum, est.n) - est.exact_mean() * est.exact_mean()) /
                                  static_cast<double>(est.n));
      passed += std::abs(to_double(est.exact_mean()) - exact) <= 3 * se;
      ++trials;
    }
  }
  const double rate = static_cast<double>(passed) / trials;
  const double t = seconds_since(start);
  o.require(exact_mismatch == 0, "convolution differs from enumeration");
  o.require(rate >= 0.98, "pass rate");
  o.require(t < 60.0, "runtime");
  o.detail << kProfiles << " profiles x " << kSeeds << " seeds at n=" << kN << ": " << passed << "/" << trials
           << " within 3 SE (" << fmt("%.2f%%", 100 * rate) << "); convolution = enumeration for k<=4: "
           << (exact_mismatch == 0 ? "yes" : "no") << "; " << fmt("%.1f s", t);
}

bool within_relative(double value, double target, double tol) { return std::abs(value - target) <= tol * std::abs(target); }

// National totals from the printed per-transaction taxes, revenue shares and transaction counts.
void criterion3(Outcome& o) {
  const auto start = Clock::now();
  const auto profiles = load_profiles(testing::data_file("calibration_2013.csv"));
  const StoreTaxes taxes{{StoreType::SupermarketsAndDrugstores, parse_decimal("0.75")},
                         {StoreType::SmallGroceries, parse_decimal("0.58")},
                         {StoreType::ConvenienceStores, parse_decimal("0.48")}};
  const Rational share(1, 4);
  const TaxTable equal = total_tax(profiles, taxes, uniform_scenario(profiles, share));
  const double printed[] = {353'962, 143'836, 9'482};
  for (std::size_t i = 0; i < 3; ++i) {
    const double nis = to_double(equal.rows[i].total) / 100;
    const bool ok = within_relative(nis, printed[i], 0.005);
    o.require(ok, std::string(to_string(equal.rows[i].store_type)) + " equal-share " + fmt("%.0f", nis) + " vs " +
                      fmt("%.0f", printed[i]) + " (" + fmt("%+.2f%%", 100 * (nis / printed[i] - 1)) + ")");
  }
  const double total = to_double(equal.grand_total) / 100;
  o.require(within_relative(total, 507'280, 0.005), "equal-share total " + fmt("%.0f", total));

  const ExtremeScenarios ex = extreme_scenarios(profiles, taxes, share);
  const double max_total = to_double(ex.max_table.grand_total) / 100;
  const double min_total = to_double(ex.min_table.grand_total) / 100;
  const double max_super = 100 * to_double(ex.max_scenario.shares.at(StoreType::SupermarketsAndDrugstores));
  const double min_super = 100 * to_double(ex.min_scenario.shares.at(StoreType::SupermarketsAndDrugstores));
  o.require(within_relative(max_total, 763'641, 0.005), "max " + fmt("%.0f", max_total));
  o.require(within_relative(min_total, 422'390, 0.005), "min " + fmt("%.0f", min_total));
  o.require(std::abs(max_super - 10.6) <= 0.1, "max-scenario supermarket share " + fmt("%.3f", max_super));
  o.require(std::abs(min_super - 29.8) <= 0.1, "min-scenario supermarket share " + fmt("%.3f", min_super));
  const double t = seconds_since(start);
  o.require(t < 1.0, "runtime");
  o.detail << "equal " << fmt("%.0f", total) << ", max " << fmt("%.0f", max_total) << " at " << fmt("%.3f%%", max_super)
           << ", min " << fmt("%.0f", min_total) << " at " << fmt("%.3f%%", min_super) << "; " << fmt("%.3f s", t);
}

// Theta arithmetic on printed regression coefficients.
void criterion4(Outcome& o) {
  const auto start = Clock::now();
  struct Column {
    const char* name;
    double b90, b00, eps, pbar, printed;
  };
  const Column columns[] = {
      {"all-weeks(1)", 0.031, 0.020, -0.650, 12.700, 0.22}, {"all-weeks(2)", 0.038, 0.011, -0.670, 7.560, 0.30},
      {"all-weeks(3)", 0.068, 0.031, -0.680, 12.610, 0.69}, {"all-weeks(4)", 0.081, 0.075, -0.700, 12.750, 0.11},
      {"durable(1)", 0.086, 0.072, -0.86, 12.73, 0.21},   {"durable(2)", 0.070, 0.0578, -1.04, 7.53, 0.37},
      {"durable(3)", 0.11, 0.072, -0.79, 12.63, 0.60},
  };
  for (const Column& c : columns) {
    const double theta = compute_theta(c.b90, c.b00, c.eps, c.pbar);
    const double two = std::round(theta * 100) / 100;
    o.detail << c.name << "=" << fmt("%.5f", theta);
    o.detail << " ";
    o.require(std::abs(two - c.printed) <= 1e-9,
              std::string(c.name) + " rounds to " + fmt("%.2f", two) + ", printed " + fmt("%.2f", c.printed));
  }
  const double t = seconds_since(start);
  o.require(t < 1.0, "runtime");
  o.detail << fmt("%.3f s", t);
}

// Estimator recovery on synthetic panels.
void criterion5(Outcome& o) {
  const auto start = Clock::now();
  SyntheticPanelSpec spec;
  spec.n_products = 50;
  spec.n_stores = 20;
  spec.n_weeks = 52;
  spec.price_grid = {parse_money("2.99"), parse_money("4.99"), parse_money("7.99"), parse_money("9.99"),
                     parse_money("12.99"), parse_money("14.99"), parse_money("17.99"), parse_money("19.99")};
  const ReducedFormPlan plan{2.0, -0.65, 0.031, 0.020, 0.015};
  spec.plan = plan;
  spec.noise_sd = 0.1;
  spec.effect_sd = 0.2;

  int hits[4] = {0, 0, 0, 0};
  std::int64_t n_obs = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    spec.seed = seed;
    const DemandPanel panel = generate_panel(spec);
    const RegressionResult r = estimate_demand(panel, assign_dummies(panel, spec.base_year, spec.base_year + 1), {});
    n_obs = r.n_observations;
    hits[0] += std::abs(r.beta90 - plan.beta90) <= 3 * r.se90;
    hits[1] += std::abs(r.beta00 - plan.beta00) <= 3 * r.se00;
    hits[2] += std::abs(*r.beta99 - plan.beta99) <= 3 * *r.se99;
    hits[3] += std::abs(r.epsilon - plan.epsilon) <= 3 * r.se_epsilon;
  }
  const char* names[] = {"b90", "b00", "b99", "eps"};
  o.require(n_obs >= 50'000, "sample size " + std::to_string(n_obs));
  for (int i = 0; i < 4; ++i) o.require(hits[i] >= 95, std::string(names[i]) + " coverage");

  spec.noise_sd = 0.0;
  spec.seed = 7;
  const DemandPanel clean = generate_panel(spec);
  const RegressionResult r = estimate_demand(clean, assign_dummies(clean, spec.base_year, spec.base_year + 1), {});
  const double noise_free_err = std::max({std::abs(r.beta90 - plan.beta90), std::abs(r.beta00 - plan.beta00),
                                          std::abs(*r.beta99 - plan.beta99), std::abs(r.epsilon - plan.epsilon)});
  o.require(noise_free_err <= 1e-8, "noise-free recovery");

  // Fixed-effect absorption against explicit dummies on small problems.
  double dummy_err = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CounterStream rng(seed, 77);
    const int n = 400;
    std::vector<std::int64_t> a(n), b(n), c(n);
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      a[i] = rng.next_u32() % 15;
      b[i] = rng.next_u32() % 6;
      c[i] = a[i] % 3;  // nested in a
      X(i, 0) = rng.next_normal();
      X(i, 1) = rng.next_uniform() < 0.4;
      y(i) = 0.7 * X(i, 0) + 0.1 * X(i, 1) + 0.05 * static_cast<double>(a[i] + b[i] * b[i]) + 0.2 * rng.next_normal();
    }
    const std::vector<FixedEffectGrouping> g{make_grouping("a", a), make_grouping("b", b), make_grouping("c", c)};
    const std::vector<std::string> names2{"x", "d"};
    const FixedEffectsFit fit = fit_fixed_effects(y, X, names2, g);
    const Eigen::VectorXd ref = testing::dummy_variable_ols(y, X, std::span(g).first(2));
    dummy_err = std::max(dummy_err, (fit.ols.coef - ref).cwiseAbs().maxCoeff());
  }
  o.require(dummy_err <= 1e-8, "absorption vs dummies");
  const double t = seconds_since(start);
  o.require(t < 300.0, "runtime");
  o.detail << "n=" << n_obs << "; within 3 SE over 100 seeds: b90 " << hits[0] << ", b00 " << hits[1] << ", b99 "
           << hits[2] << ", eps " << hits[3] << "; noise-free error " << fmt("%.1e", noise_free_err)
           << "; absorption vs dummies " << fmt("%.1e", dummy_err) << "; " << fmt("%.1f s", t);
}

// Penalty tables from printed means and volumes.
void criterion6(Outcome& o) {
  const auto start = Clock::now();
  struct Table {
    const char* name;
    const char* after[3];
    const char* before[3];
    std::int64_t printed[3];
  };
  const Table tables[] = {
      {"capped 2021 vs 2013", {"77.9", "59.8", "49.5"}, {"69.3", "55.5", "46.2"}, {230'931'612, 36'352'338, 1'901'734}},
      {"capped 2021 vs 2012", {"77.9", "59.8", "49.5"}, {"74.8", "56.2", "56.0"}, {84'114'987, 30'370'882, -3'752'697}},
      {"uncapped 2021 vs 2013", {"73.5", "58.3", "52.4"}, {"63.0", "55.6", "48.6"}, {281'951'387, 22'825'886, 2'189'875}},
  };
  const char* volumes[] = {"2685251.3", "845403.2", "57628.3"};
  std::map<StoreType, Rational> units;
  for (std::size_t i = 0; i < 3; ++i) units[kStoreTypes[i]] = parse_decimal(volumes[i]) * 1000;

  for (const Table& tb : tables) {
    PennyStats after, before;
    for (std::size_t i = 0; i < 3; ++i) {
      after.groups.push_back({GroupKey{kStoreTypes[i], std::nullopt}, parse_decimal(tb.after[i]), 1});
      before.groups.push_back({GroupKey{kStoreTypes[i], std::nullopt}, parse_decimal(tb.before[i]), 1});
    }
    const PenaltyTable pt = inattention_penalty(after, before, units, PenaltyRounding::OneDecimal);
    bool all = true;
    std::ostringstream got;
    for (std::size_t i = 0; i < 3; ++i) {
      const BigInt nis = to_whole_nis(pt.rows[i].total);
      got << (i ? "/" : "") << nis;
      all = all && nis == BigInt(tb.printed[i]);
    }
    o.detail << tb.name << " " << (all ? "exact" : "computed " + got.str()) << "; ";
    if (!all) {
      std::ostringstream want;
      for (std::size_t i = 0; i < 3; ++i) want << (i ? "/" : "") << tb.printed[i];
      o.require(false, std::string(tb.name) + " printed " + want.str());
    }
  }
  const double t = seconds_since(start);
  o.require(t < 1.0, "runtime");
  o.detail << fmt("%.3f s", t);
}

// Perceived price.
void criterion7(Outcome& o) {
  const Money p = parse_money("9.99");
  const std::string full = perceived_price(p, BiasParams::make(1.0)).to_string();
  const std::string partial = perceived_price(p, BiasParams::make(0.2)).to_string();
  o.require(full == "9.00", "theta=1 gives " + full);
  o.require(partial == "9.79", "theta=0.2 gives " + partial);
  o.require(perceived_price(p, BiasParams::make(0.2)).units == 979'200'000, "theta=0.2 not exactly 9.792");

  CounterStream rng(2024, 0);
  double worst = 0.0;
  for (int i = 0; i < 100'000; ++i) {
    const Money price(static_cast<std::int64_t>(rng.next_u32() % 1'000'000));
    const int focal = static_cast<int>(rng.next_u32() % 100);
    const double t1 = static_cast<double>(rng.next_u32() % 1'000'001) * 1e-6;
    const double t2 = static_cast<double>(rng.next_u32() % 1'000'001) * 1e-6;
    const double lambda = rng.next_uniform();
    const double mix = lambda * t1 + (1 - lambda) * t2;
    // Rounding the mixed theta to a millionth moves the price by at most 0.5e-6 * ending / 100.
    const double direct = perceived_price(price, BiasParams::make(mix, focal)).nis();
    const double affine = lambda * perceived_price(price, BiasParams::make(t1, focal)).nis() +
                          (1 - lambda) * perceived_price(price, BiasParams::make(t2, focal)).nis();
    const double quantisation = std::abs(std::round(mix * 1e6) * 1e-6 - mix) * std::abs(price.ending() - focal) / 100.0;
    worst = std::max(worst, std::abs(direct - affine) - quantisation);
  }
  o.require(worst <= 1e-9, "affinity");
  o.detail << "9.99 -> " << full << " (theta 1), " << partial << " (theta 0.2); affinity residual " << fmt("%.1e", worst)
           << " over 100,000 draws";
}

// Determinism of every seeded subcommand across worker counts.
void criterion8(Outcome& o) {
  const auto start = Clock::now();
  const auto dir = testing::scratch_dir("acceptance-determinism");
  const std::string profiles = testing::data_file("calibration_2013.csv");
  int compared = 0;

  auto check = [&](const std::string& label, const std::function<std::vector<std::string>(const std::string&)>& args,
                   const std::function<std::string(const std::string&)>& body) {
    std::string first;
    for (const char* w : {"1", "2", "8"}) {
      const auto r = testing::run(args(w));
      if (r.code != 0) {
        o.require(false, label + " failed: " + r.err);
        return;
      }
      const std::string b = r.out + body(w);
      if (std::string(w) == "1") {
        first = b;
      } else {
        o.require(b == first, label + " differs at workers=" + w);
      }
    }
    ++compared;
  };
  auto none = [](const std::string&) { return std::string(); };
  auto file = [&](const std::string& name) {
    return [&, name](const std::string&) { return testing::slurp(dir / (name + ".csv")); };
  };

  check("simulate", [&](const std::string& w) {
    return std::vector<std::string>{"simulate", "--profiles", profiles, "--n", "20000", "--seed", "5", "--workers", w};
  }, none);
  check("oracle --compare", [&](const std::string& w) {
    return std::vector<std::string>{"oracle", "--compare", "--profiles", profiles, "--n", "20000", "--seed", "6", "--workers", w};
  }, none);
  for (const char* kind : {"panel", "monthly", "observations"}) {
    check(std::string("generate ") + kind, [&, kind](const std::string& w) {
      std::vector<std::string> a{"generate", "--kind", kind, "--seed", "9", "--workers", w,
                                 "--output", (dir / (std::string(kind) + ".csv")).string()};
      if (std::string(kind) == "observations") a.insert(a.end(), {"--profiles", profiles, "--per-group", "200"});
      if (std::string(kind) == "panel") a.insert(a.end(), {"--products", "20", "--stores", "10"});
      return a;
    }, file(kind));
  }
  // Downstream of the generated files.
  check("estimate", [&](const std::string&) {
    return std::vector<std::string>{"estimate", "--panel", (dir / "panel.csv").string(), "--monthly",
                                    (dir / "monthly.csv").string()};
  }, none);
  check("analyze", [&](const std::string&) {
    return std::vector<std::string>{"analyze", "--observations", (dir / "observations.csv").string(),
                                    "--price-cap-agorot", "2000"};
  }, none);
  o.detail << compared << " subcommand runs byte-identical across 1, 2, 8 workers; " << fmt("%.1f s", seconds_since(start));
}

}  // namespace
}  // namespace roundtax

int main(int argc, char** argv) {
  const std::vector<std::function<void(roundtax::Outcome&)>> criteria{
      roundtax::criterion1, roundtax::criterion2, roundtax::criterion3, roundtax::criterion4,
      roundtax::criterion5, roundtax::criterion6, roundtax::criterion7, roundtax::criterion8};
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (only != 0 && only != number) continue;
    roundtax::Outcome o;
    try {
      criteria[i](o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << number << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str() << o.failures.str()
              << std::endl;
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
