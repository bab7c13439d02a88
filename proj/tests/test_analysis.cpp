#include <gtest/gtest.h>

#include "beergame/analysis.hpp"
#include "beergame/game.hpp"
#include "beergame/policies.hpp"
#include "oracle/stat_oracles.hpp"

using namespace beergame;

namespace {

TeamTrace with_orders(const std::vector<Units>& orders) {
    TeamTrace t;
    t.config.horizon = static_cast<int>(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
        PeriodRecord r;
        r.period = static_cast<int>(i) + 1;
        r.orders = {orders[i], 0, 0, 0};
        t.periods.push_back(r);
    }
    return t;
}

std::vector<TeamTrace> fleet(const ScriptRule& rule, int runs, GameConfig cfg = {}) {
    std::vector<TeamTrace> out;
    ScriptedPolicy p(rule);
    for (int r = 0; r < runs; ++r) out.push_back(run_game(cfg, {&p, &p, &p, &p}, 1000 + r, Regime::isolated));
    return out;
}

}  // namespace

TEST(OrderVariance, Examples) {
    EXPECT_EQ(order_variance(with_orders({5, 5, 5, 5}), 1), Rational(0));
    EXPECT_EQ(order_variance(with_orders({0, 8}), 1), Rational(32));
    EXPECT_EQ(order_variance(with_orders({4, 4, 4, 4, 8}), 1), Rational(16, 5));
    EXPECT_THROW(order_variance(with_orders({3}), 1), DomainError);
}

TEST(Bullwhip, SteadyFleetHasNoAmplification) {
    GameConfig cfg;
    cfg.demand_min = cfg.demand_max = 4;
    const auto runs = fleet(ConstantRule{4}, 32, cfg);
    const auto rep = bullwhip_report(runs);
    EXPECT_EQ(rep.n, 96);
    EXPECT_EQ(rep.statistic, 0);
    EXPECT_EQ(rep.p_value, 1.0);
    for (const auto& r : runs) EXPECT_EQ(stage_variances(r), (std::array<double, 4>{0, 0, 0, 0}));
    EXPECT_EQ(cost_summary(runs).mean_system_cost, Rational(480));
}

TEST(Bullwhip, PanicFleetAmplifies) {
    const auto runs = fleet(PanicRule{1.0, 0.2, 12}, 32);
    const auto rep = bullwhip_report(runs);
    EXPECT_EQ(rep.n, 96);
    EXPECT_LT(rep.p_value, 0.001);
    // Recount directly from the order paths.
    std::int64_t k = 0;
    for (const auto& r : runs) {
        std::array<double, 4> v{};
        for (std::size_t i = 0; i < 4; ++i) {
            std::vector<double> o;
            for (const auto& p : r.periods) o.push_back(static_cast<double>(p.orders[i]));
            v[i] = stats::sample_variance(o);
        }
        for (std::size_t i = 0; i < 3; ++i) k += v[i + 1] > v[i] + 1e-9;
    }
    EXPECT_EQ(rep.statistic, static_cast<double>(k));
    EXPECT_DOUBLE_EQ(rep.p_value, stats::sign_test(k, 96));
    EXPECT_GT(rep.extra.at("end_to_end_pct"), 0);
}

TEST(Regression, ExactFitRecovery) {
    RegressionData d;
    for (int t = 0; t < 20; ++t) {
        const double inv = (t * 7) % 11 - 4;
        d.regressors.push_back({inv, 4, 4, 8, 1});
        d.response.push_back(2 + 3 * inv);
    }
    const auto fit = fit_regression(d);
    ASSERT_TRUE(fit.valid);
    EXPECT_NEAR(fit.coef[0], 2, 1e-9);
    EXPECT_NEAR(fit.a_I(), 3, 1e-9);
    EXPECT_TRUE(fit.dropped[2] && fit.dropped[3] && fit.dropped[4] && fit.dropped[5]);
    EXPECT_FALSE(fit.comparable());
}

TEST(Regression, DeficiencyRule) {
    RegressionData d;
    for (int t = 0; t < 12; ++t) {
        d.regressors.push_back({double(t % 3), double(t % 5), double(t % 3) * 2 + 1, double(t % 4), double(t + 1)});
        d.response.push_back(4);
    }
    EXPECT_EQ(fit_regression(d).reason, "constant response");
    d.response[3] = 5;
    const auto fit = fit_regression(d);
    EXPECT_FALSE(fit.valid);
    EXPECT_EQ(fit.reason, "rank-deficient design");
    RegressionData small;
    small.regressors.resize(5);
    small.response = {1, 2, 3, 4, 5};
    EXPECT_EQ(fit_regression(small).reason, "fewer than 8 observations");
}

TEST(Regression, RegressorsFollowTheTrace) {
    const auto runs = fleet(PanicRule{1.0, 0.2, 12}, 1);
    const auto& tr = runs[0];
    const auto d = regression_data(tr, 3);
    ASSERT_EQ(d.response.size(), 20u);
    EXPECT_EQ(d.regressors[0][0], 12);
    for (std::size_t t = 1; t < 20; ++t) {
        EXPECT_EQ(d.regressors[t][0], tr.periods[t - 1].inventory_end[2]);
        EXPECT_EQ(d.regressors[t][1], tr.periods[t].incoming[2]);
        EXPECT_EQ(d.regressors[t][2], tr.periods[t].arrivals[2]);
        EXPECT_EQ(d.regressors[t][3], tr.periods[t].supply_line[2]);
        EXPECT_EQ(d.regressors[t][4], static_cast<double>(t + 1));
        EXPECT_EQ(d.response[t], tr.periods[t].orders[2]);
    }
    // Against the normal-equations oracle on the kept columns.
    const auto fit = fit_regression(d);
    ASSERT_TRUE(fit.valid);
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < 5; ++j)
        if (!fit.dropped[j + 1]) kept.push_back(j);
    for (const auto& r : d.regressors) {
        std::vector<double> row{1.0};
        for (const auto j : kept) row.push_back(r[j]);
        rows.push_back(row);
    }
    const auto ref = oracle::normal_equations(rows, d.response);
    EXPECT_NEAR(fit.coef[0], ref[0], 1e-8);
    for (std::size_t c = 0; c < kept.size(); ++c) EXPECT_NEAR(fit.coef[kept[c] + 1], ref[c + 1], 1e-8);
}

TEST(Myopia, PanicFleetUnderweightsSupplyLine) {
    const auto runs = fleet(PanicRule{1.0, 0.2, 12}, 32);
    std::vector<RegressionFit> fits;
    for (const auto& r : runs)
        for (int i = 1; i <= 4; ++i) fits.push_back(fit_ordering_regression(r, i));
    const auto rep = myopia_sign_test(fits);
    std::int64_t k = 0, n = 0;
    for (const auto& f : fits)
        if (f.comparable()) {
            ++n;
            k += f.a_N() > f.a_I();
        }
    EXPECT_EQ(rep.n, n);
    EXPECT_EQ(rep.statistic, static_cast<double>(k));
    EXPECT_EQ(rep.extra.at("excluded_fits"), static_cast<double>(128 - n));
    EXPECT_GT(n, 64);
    EXPECT_LT(rep.p_value, 0.001);
}

TEST(Myopia, NoComparableFits) {
    std::vector<RegressionFit> fits(3);
    const auto rep = myopia_sign_test(fits);
    EXPECT_EQ(rep.n, 0);
    EXPECT_EQ(rep.p_value, 1.0);
    EXPECT_EQ(rep.extra.at("excluded_fits"), 3);
    EXPECT_THROW(myopia_sign_test(std::vector<RegressionFit>{}), DomainError);
}

TEST(Costs, MeansAreExact) {
    GameConfig cfg;
    const auto runs = fleet(MatchDemandRule{}, 3, cfg);
    const auto c = cost_summary(runs);
    Rational total{0};
    for (const auto& r : runs) total += system_cost(r);
    EXPECT_EQ(c.mean_system_cost * Rational(3), total);
    Rational stage_sum{0};
    for (const auto& s : c.mean_stage_cost) stage_sum += s;
    EXPECT_EQ(stage_sum, c.mean_system_cost);
    auto partial = runs;
    partial[1].periods.pop_back();
    EXPECT_THROW(cost_summary(partial), DomainError);
}

TEST(SharingEffect, OneSidedSharedBelowIsolated) {
    const std::vector<double> iso{9, 12, 15, 11, 14, 13, 10, 16}, shared{3, 5, 4, 6, 2, 7, 5, 4};
    const auto e = sharing_effect(iso, shared);
    EXPECT_EQ(e.without_sharing.n, 8u);
    EXPECT_DOUBLE_EQ(e.without_sharing.mean, 12.5);
    EXPECT_DOUBLE_EQ(e.with_sharing.median, 4.5);
    EXPECT_LT(e.t_test.p_value, 0.001);
    EXPECT_LT(e.mann_whitney.p_value, 0.001);
    const auto reverse = sharing_effect(shared, iso);
    EXPECT_GT(reverse.t_test.p_value, 0.99);
    EXPECT_GT(reverse.mann_whitney.p_value, 0.99);
}
