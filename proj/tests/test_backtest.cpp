#include <catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace pairs;
using namespace test_util;
using Catch::Approx;

namespace {

struct PairWorld {
    PricePanel train;
    PricePanel test;
    PairCandidate pair;
    std::map<std::string, OuParams> params;
};

// One synthetic cointegrated pair, half train and half test.
PairWorld pair_world(std::uint64_t seed, std::size_t days = 500, double scale = 1.0) {
    SynthConfig cfg;
    cfg.n_days = days;
    auto sp = synth_pair(cfg, seed);
    for (auto* leg : {&sp.leg_i, &sp.leg_j})
        for (auto& v : *leg) v *= scale;
    auto panel = make_panel({"I", "J"}, {sp.leg_i, sp.leg_j});
    PairWorld w;
    std::size_t half = days / 2;
    w.train = panel.slice(0, half);
    w.test = panel.slice(half, days);
    w.pair = make_pair_candidate("I", "J");
    auto fit = fit_ar1(make_spread(w.train, w.pair));
    w.params.emplace(w.pair.id(), ou_from_ar1(fit.a, fit.b, fit.sd_eps));
    return w;
}

}  // namespace

TEST_CASE("pair_daily_return", "[backtest]") {
    // closes chosen so that on day 1 R_i = 0.02 and R_j = -0.01
    auto panel = make_panel({"A", "B"}, {{100, 102, 102}, {50, 49.5, 49.5}});
    auto pair = make_pair_candidate("A", "B");
    CHECK(pair_daily_return(std::vector<int>{0, 0, 0}, panel, pair) == std::vector<double>{0, 0, 0});
    auto r = pair_daily_return(std::vector<int>{0, 1, 1}, panel, pair);
    CHECK(r[1] == Approx(0.015).epsilon(1e-12));
    CHECK(r[2] == 0.0);
    auto s = pair_daily_return(std::vector<int>{0, -1, -1}, panel, pair);
    CHECK(s[1] == -r[1]);

    SECTION("a missing leg return on an active day is booked as 0 and counted") {
        std::size_t missing = 0;
        auto m = pair_daily_return(std::vector<int>{1, 1, 0}, panel, pair, 0.0, &missing);
        CHECK(m[0] == 0.0);  // row 0 has no return
        CHECK(missing == 1);
    }
    SECTION("trade cost per unit of position change") {
        auto c = pair_daily_return(std::vector<int>{0, 1, 0}, panel, pair, 0.001);
        CHECK(c[1] == Approx(0.015 - 0.001));
        CHECK(c[2] == Approx(-0.001));
    }
    CHECK_THROWS_AS(pair_daily_return(std::vector<int>{0, 1}, panel, pair), DataError);
}

TEST_CASE("run_backtest with hand-computed prices", "[backtest]") {
    // 10 days, two pairs; the oracle recomputes each pair's series from the
    // positions and prices by hand and averages them.
    std::vector<double> a = {10, 10.2, 10.1, 10.4, 10.3, 10.6, 10.5, 10.9, 10.8, 11.0};
    std::vector<double> b = {20, 20.1, 20.3, 20.2, 20.6, 20.5, 20.9, 20.8, 21.2, 21.1};
    std::vector<double> c = {5, 5.1, 5.0, 4.9, 5.2, 5.1, 5.3, 5.2, 5.4, 5.5};
    std::vector<double> d = {7, 7.0, 7.2, 7.1, 7.0, 7.3, 7.2, 7.4, 7.3, 7.6};
    auto panel = make_panel({"A", "B", "C", "D"}, {a, b, c, d});
    std::vector<int> p1 = {0, 1, 1, 1, 0, 0, -1, -1, 0, 0};
    std::vector<int> p2 = {0, 0, -1, -1, -1, 1, 1, 0, 0, 1};
    auto r1 = pair_daily_return(p1, panel, make_pair_candidate("A", "B"));
    auto r2 = pair_daily_return(p2, panel, make_pair_candidate("C", "D"));
    for (std::size_t t = 1; t < 10; ++t) {
        double h1 = p1[t] * ((a[t] / a[t - 1] - 1) - (b[t] / b[t - 1] - 1)) / 2;
        double h2 = p2[t] * ((c[t] / c[t - 1] - 1) - (d[t] / d[t - 1] - 1)) / 2;
        CHECK(r1[t] == Approx(h1).margin(1e-15));
        CHECK(r2[t] == Approx(h2).margin(1e-15));
        CHECK((r1[t] + r2[t]) / 2 == Approx((h1 + h2) / 2).margin(1e-15));
    }
}

TEST_CASE("run_backtest structure", "[backtest]") {
    auto w = pair_world(3);
    BacktestConfig cfg;
    for (auto kind : {StrategyKind::Baseline, StrategyKind::Ou}) {
        auto res = run_backtest(w.test, {w.pair}, kind, cfg, w.params);
        REQUIRE(res.pair_ids == std::vector<std::string>{"I~J"});
        CHECK(res.dates == w.test.dates);
        CHECK(res.portfolio_returns.size() == w.test.num_dates());
        for (std::size_t t = 0; t < res.dates.size(); ++t) {
            if (res.positions(t, 0) == 0) CHECK(res.per_pair_returns(t, 0) == 0.0);
            CHECK(res.portfolio_returns[t] == res.per_pair_returns(t, 0));
        }
        // no trades before the percentile window fills
        for (std::size_t t = 0; t <= cfg.thresholds.pct_window - 1; ++t) CHECK(res.positions(t, 0) == 0);
    }

    SECTION("a flat pair contributes zero") {
        std::vector<double> flat_a(200, 10.0), flat_b(200, 8.0);
        auto panel = make_panel({"A", "B"}, {flat_a, flat_b});
        auto res = run_backtest(panel, {make_pair_candidate("A", "B")}, StrategyKind::Baseline, cfg);
        for (double r : res.portfolio_returns) CHECK(r == 0.0);
    }
    SECTION("pairs without OU parameters are skipped; none left is a pipeline error") {
        auto other = make_pair_candidate("I", "X");
        auto res = run_backtest(w.test, {w.pair, other}, StrategyKind::Ou, cfg, w.params);
        CHECK(res.pair_ids.size() == 1);
        REQUIRE(res.skipped.size() == 1);
        CHECK(res.skipped[0].pair_id == "I~X");
        CHECK_THROWS_AS(run_backtest(w.test, {other}, StrategyKind::Ou, cfg, w.params), PipelineError);
        CHECK_THROWS_AS(run_backtest(w.test, {}, StrategyKind::Baseline, cfg), PipelineError);
    }
}

TEST_CASE("equal-weight identity over several pairs", "[backtest][property]") {
    SynthConfig sc;
    sc.n_pairs = 4;
    sc.n_days = 400;
    sc.n_decoys = 0;
    sc.seed = 12;
    auto synth = generate_synthetic(sc);
    auto panel = build_panel(synth.records);
    auto [train, test] = split_panel(panel, synth.config.split);
    std::vector<PairCandidate> pairs;
    std::map<std::string, OuParams> params;
    for (std::size_t p = 1; p <= 4; ++p) {
        auto pair = make_pair_candidate(fmt::format("SYN{:02d}A", p), fmt::format("SYN{:02d}B", p));
        auto fit = fit_ar1(make_spread(train, pair));
        params.emplace(pair.id(), ou_from_ar1(fit.a, fit.b, fit.sd_eps));
        pairs.push_back(pair);
    }
    for (auto kind : {StrategyKind::Baseline, StrategyKind::Ou}) {
        auto res = run_backtest(test, pairs, kind, {}, params);
        REQUIRE(res.pair_ids.size() == 4);
        for (std::size_t t = 0; t < res.dates.size(); ++t) {
            double sum = 0.0;
            for (std::size_t p = 0; p < 4; ++p) sum += res.per_pair_returns(t, p);
            CHECK(std::abs(res.portfolio_returns[t] - sum / 4.0) <= 1e-12);
        }
    }
}

TEST_CASE("no lookahead under truncation", "[backtest][property]") {
    auto w = pair_world(8, 500);
    for (auto kind : {StrategyKind::Baseline, StrategyKind::Ou}) {
        auto full = run_backtest(w.test, {w.pair}, kind, {}, w.params);
        for (std::size_t cut : {120u, 180u, 249u}) {
            auto part = run_backtest(w.test.slice(0, cut), {w.pair}, kind, {}, w.params);
            for (std::size_t t = 0; t < cut; ++t) {
                CHECK(part.portfolio_returns[t] == full.portfolio_returns[t]);
                CHECK(part.positions(t, 0) == full.positions(t, 0));
            }
        }
    }
}

TEST_CASE("OU positions are invariant to a common price scale", "[backtest][property]") {
    for (double scale : {4.0, 3.0, 0.37}) {
        auto base = pair_world(21, 500, 1.0);
        auto scaled = pair_world(21, 500, scale);
        auto r0 = run_backtest(base.test, {base.pair}, StrategyKind::Ou, {}, base.params);
        auto r1 = run_backtest(scaled.test, {scaled.pair}, StrategyKind::Ou, {}, scaled.params);
        CHECK(r0.positions == r1.positions);
    }
}

TEST_CASE("strongly mean-reverting pairs are profitable", "[backtest][mc]") {
    std::size_t positive_baseline = 0, positive_ou = 0;
    const std::size_t seeds = 50;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        auto w = pair_world(500 + seed, 500);
        for (auto kind : {StrategyKind::Baseline, StrategyKind::Ou}) {
            auto res = run_backtest(w.test, {w.pair}, kind, {}, w.params);
            double equity = 1.0;
            for (double r : res.portfolio_returns) equity *= 1.0 + r;
            if (equity > 1.0) ++(kind == StrategyKind::Baseline ? positive_baseline : positive_ou);
        }
    }
    INFO("baseline " << positive_baseline << "/" << seeds << ", ou " << positive_ou << "/" << seeds);
    CHECK(positive_baseline >= 40);
    CHECK(positive_ou >= 40);
}
