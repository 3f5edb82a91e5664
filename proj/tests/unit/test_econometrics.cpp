#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "roundtax/delimited.hpp"
#include "roundtax/econometrics/demand.hpp"
#include "roundtax/perception.hpp"
#include "test_support.hpp"

namespace roundtax {
namespace {

DemandRecord record(int product, int store, int week, int year, std::int64_t agorot, double q = 1.0) {
  DemandRecord r;
  r.product = product;
  r.store = store;
  r.chain = store;
  r.category = product;
  r.week = week;
  r.year = year;
  r.month = 1;
  r.price = Money(agorot);
  r.quantity = q;
  return r;
}

DemandPanel hand_panel() {
  DemandPanel p;
  p.products.intern("A");
  p.products.intern("B");
  p.stores.intern("S");
  p.chains.intern("C");
  p.categories.intern("K");
  p.categories.intern("L");
  // Pair A: 9.99 is the mode, a tie between 4.99 and 5.99 is absent.
  p.records = {record(0, 0, 1, 2013, 999), record(0, 0, 2, 2013, 999), record(0, 0, 3, 2013, 1099),
               record(0, 0, 4, 2014, 990), record(0, 0, 5, 2014, 1000), record(0, 0, 6, 2014, 995),
               // Pair B: 4.99 and 5.99 both twice; the lower wins.
               record(1, 0, 1, 2013, 599), record(1, 0, 2, 2013, 499), record(1, 0, 3, 2013, 599),
               record(1, 0, 4, 2013, 499), record(1, 0, 5, 2014, 490)};
  return p;
}

TEST(Panel, ModalPriceBreaksTiesDownward) {
  const DemandPanel p = hand_panel();
  EXPECT_EQ(find_modal_99_price(p, 0, 0, 2013), Money(999));
  EXPECT_EQ(find_modal_99_price(p, 1, 0, 2013), Money(499));
  EXPECT_FALSE(find_modal_99_price(p, 0, 0, 2012).has_value());
}

TEST(Panel, DummiesFollowTheModalPrice) {
  const DemandPanel p = hand_panel();
  const DummyAssignment d = assign_dummies(p, 2013, 2014);
  ASSERT_EQ(d.flags.size(), p.records.size());
  EXPECT_TRUE(d.flags[0].d99);
  EXPECT_FALSE(d.flags[2].d99);
  EXPECT_TRUE(d.flags[3].d90);
  EXPECT_TRUE(d.flags[4].d00);
  EXPECT_FALSE(d.flags[5].usable);  // 9.95 after the regulation
  EXPECT_TRUE(d.flags[10].d90);
  EXPECT_THROW(assign_dummies(p, 2014, 2014), std::domain_error);
}

TEST(Panel, DurabilityKeepsLongRunsOnly) {
  DemandPanel p = hand_panel();
  const DemandPanel two = filter_durable_prices(p, 2);
  ASSERT_EQ(two.records.size(), 2u);
  EXPECT_EQ(two.records[0].week, 1);
  EXPECT_EQ(two.records[1].week, 2);
  EXPECT_EQ(filter_durable_prices(p, 1).records.size(), p.records.size());
  EXPECT_THROW(filter_durable_prices(p, 0), std::invalid_argument);
}

TEST(Panel, RoundTripsThroughFiles) {
  const auto dir = testing::scratch_dir("panel");
  const DemandPanel p = hand_panel();
  write_demand_panel((dir / "p.csv").string(), p);
  const DemandPanel q = load_demand_panel((dir / "p.csv").string());
  ASSERT_EQ(q.records.size(), p.records.size());
  for (std::size_t i = 0; i < p.records.size(); ++i) {
    EXPECT_EQ(q.records[i].price, p.records[i].price);
    EXPECT_EQ(q.records[i].quantity, p.records[i].quantity);
  }
  EXPECT_THROW(load_demand_panel((dir / "missing.csv").string()), ParseError);
}

struct Problem {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<FixedEffectGrouping> groupings;
};

Problem random_problem(std::uint64_t seed, int n) {
  CounterStream rng(seed, 1);
  std::vector<std::int64_t> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
  Problem pr{Eigen::VectorXd(n), Eigen::MatrixXd(n, 2), {}};
  for (int i = 0; i < n; ++i) {
    a[static_cast<std::size_t>(i)] = rng.next_u32() % 7;
    b[static_cast<std::size_t>(i)] = rng.next_u32() % 5;
    pr.X(i, 0) = rng.next_normal();
    pr.X(i, 1) = rng.next_uniform() < 0.3 ? 1.0 : 0.0;
    pr.y(i) = 0.5 * pr.X(i, 0) - 0.2 * pr.X(i, 1) + 0.1 * static_cast<double>(a[static_cast<std::size_t>(i)]) +
              0.05 * static_cast<double>(b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)]) +
              0.3 * rng.next_normal();
  }
  pr.groupings.push_back(make_grouping("a", a));
  pr.groupings.push_back(make_grouping("b", b));
  return pr;
}

TEST(FixedEffects, AbsorptionMatchesDummyVariableOls) {
  const std::vector<std::string> names{"x", "d"};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Problem pr = random_problem(seed, 300);
    const FixedEffectsFit fit = fit_fixed_effects(pr.y, pr.X, names, pr.groupings);
    const Eigen::VectorXd ref = testing::dummy_variable_ols(pr.y, pr.X, pr.groupings);
    EXPECT_NEAR(fit.ols.coef[0], ref[0], 1e-8);
    EXPECT_NEAR(fit.ols.coef[1], ref[1], 1e-8);
    EXPECT_EQ(fit.absorbed_dof, 7 + 5 - 1);
  }
}

TEST(FixedEffects, AbsorptionIsIdempotentAndOrthogonal) {
  const Problem pr = random_problem(9, 200);
  Eigen::MatrixXd cols(pr.X.rows(), 3);
  cols << pr.y, pr.X;
  absorb_fixed_effects(cols, std::span<const FixedEffectGrouping>(pr.groupings));
  const Eigen::MatrixXd once = cols;
  absorb_fixed_effects(cols, std::span<const FixedEffectGrouping>(pr.groupings));
  EXPECT_LT((cols - once).cwiseAbs().maxCoeff(), 1e-9);
  for (const auto& g : pr.groupings) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(g.levels, 3);
    for (Eigen::Index i = 0; i < cols.rows(); ++i) sums.row(g.level[static_cast<std::size_t>(i)]) += cols.row(i);
    EXPECT_LT(sums.cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(FixedEffects, NestedGroupingsAddNoDegreesOfFreedom) {
  const std::vector<std::int64_t> fine{0, 1, 2, 3, 0, 1};
  const std::vector<std::int64_t> coarse{0, 0, 1, 1, 0, 0};
  const std::vector<FixedEffectGrouping> g{make_grouping("fine", fine), make_grouping("coarse", coarse)};
  EXPECT_EQ(absorbed_degrees_of_freedom(g), 4);
}

TEST(FixedEffects, CollinearRegressorIsNamed) {
  Problem pr = random_problem(2, 100);
  Eigen::MatrixXd X(pr.X.rows(), 3);
  X << pr.X, 2.0 * pr.X.col(0);
  const std::vector<std::string> names{"x", "d", "twice_x"};
  try {
    fit_fixed_effects(pr.y, X, names, pr.groupings);
    FAIL() << "expected RankDeficientError";
  } catch (const RankDeficientError& e) {
    EXPECT_EQ(e.regressor(), "twice_x");
  }
}

TEST(FixedEffects, WithoutEffectsMatchesPlainOls) {
  const Problem pr = random_problem(4, 150);
  const std::vector<std::string> names{"x", "d"};
  const FixedEffectsFit fit = fit_fixed_effects(pr.y, pr.X, names, {});
  const Eigen::VectorXd ref = testing::dummy_variable_ols(pr.y, pr.X, {});
  EXPECT_NEAR(fit.ols.coef[0], ref[0], 1e-10);
  EXPECT_NEAR(fit.ols.coef[1], ref[1], 1e-10);
  EXPECT_GT(fit.intercept_std_error, 0.0);
}

SyntheticPanelSpec panel_spec(double noise, std::uint64_t seed) {
  SyntheticPanelSpec spec;
  spec.n_products = 20;
  spec.n_stores = 10;
  spec.n_weeks = 40;
  spec.price_grid = {parse_money("2.99"), parse_money("7.99"), parse_money("14.99")};
  spec.plan = ReducedFormPlan{2.0, -0.65, 0.031, 0.020, 0.012};
  spec.noise_sd = noise;
  spec.effect_sd = 0.2;
  spec.seed = seed;
  return spec;
}

TEST(Demand, NoiseFreePanelRecoversThePlan) {
  const DemandPanel panel = generate_panel(panel_spec(0.0, 3));
  const RegressionResult r = estimate_demand(panel, assign_dummies(panel, 2013, 2014), {});
  EXPECT_NEAR(r.beta90, 0.031, 1e-8);
  EXPECT_NEAR(r.beta00, 0.020, 1e-8);
  EXPECT_NEAR(*r.beta99, 0.012, 1e-8);
  EXPECT_NEAR(r.epsilon, -0.65, 1e-8);
  ASSERT_TRUE(r.theta_hat.has_value());
  EXPECT_NEAR(*r.theta_hat, compute_theta(0.031, 0.020, -0.65, r.mean_price), 1e-7);
}

TEST(Demand, NoisyPanelIsWithinSampling) {
  const DemandPanel panel = generate_panel(panel_spec(0.1, 5));
  const RegressionResult r = estimate_demand(panel, assign_dummies(panel, 2013, 2014), {});
  EXPECT_LT(std::abs(r.beta90 - 0.031), 4 * r.se90);
  EXPECT_LT(std::abs(r.beta00 - 0.020), 4 * r.se00);
  EXPECT_LT(std::abs(r.epsilon + 0.65), 4 * r.se_epsilon);
  EXPECT_EQ(r.n_pairs, 200);
}

TEST(Demand, RestrictionsShrinkTheSample) {
  const DemandPanel panel = generate_panel(panel_spec(0.1, 5));
  const DummyAssignment d = assign_dummies(panel, 2013, 2014);
  const auto all = select_sample(panel, d, {PairRestriction::None, std::nullopt, std::nullopt});
  const auto capped = select_sample(panel, d, {PairRestriction::BothEndings, Money(1000), std::nullopt});
  EXPECT_EQ(all.size(), panel.records.size());
  EXPECT_LT(capped.size(), all.size());
  for (std::size_t i : capped) EXPECT_LT(panel.records[i].price, Money(1000));
  DemandSpecification spec;
  spec.restrictions.before_year = 2000;
  EXPECT_THROW(estimate_demand(panel, d, spec), std::domain_error);
}

TEST(Demand, ThetaArithmetic) {
  EXPECT_NEAR(compute_theta(0.031, 0.020, -0.65, 12.7), 0.011 / 0.65 * 12.7, 1e-15);
  EXPECT_EQ(compute_theta(0.05, 0.05, -1.0, 10.0), 0.0);
  EXPECT_THROW(compute_theta(0.03, 0.02, 0.0, 10.0), std::domain_error);
  EXPECT_EQ(parse_fixed_effect("cat_month"), FixedEffect::CategoryMonth);
  EXPECT_EQ(parse_restriction("either-ending"), PairRestriction::EitherEnding);
  EXPECT_THROW(parse_restriction("both"), std::invalid_argument);
}

TEST(Premium, RecoversThePlantedPremium) {
  PriceChangePanelSpec spec;
  spec.n_products = 200;
  spec.n_stores = 10;
  spec.seed = 8;
  const PremiumResult r = price_change_premium(generate_price_change_panel(spec), {PremiumEffect::Year, PremiumEffect::Month});
  EXPECT_GT(r.n_observations, 5000);
  EXPECT_LT(std::abs(r.beta - 0.01), 4 * r.std_error + 0.002);
}

TEST(Premium, ChangesAreConsecutiveMonths) {
  MonthlyPanel p;
  p.records = {{0, 0, 0, 0, 2015, 11, Money(1000)}, {0, 0, 0, 0, 2015, 12, Money(1090)},
               {0, 0, 0, 0, 2016, 1, Money(1090)}, {0, 0, 0, 0, 2016, 3, Money(1200)}};
  const auto changes = price_changes(p);
  ASSERT_EQ(changes.size(), 1u);
  EXPECT_TRUE(changes[0].ends_in_90);
  EXPECT_NEAR(changes[0].log_change, std::log(1.09), 1e-12);
}

}  // namespace
}  // namespace roundtax
