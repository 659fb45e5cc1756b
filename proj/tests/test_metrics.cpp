#include <catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include "test_util.hpp"

using namespace pairs;
using namespace test_util;
using Catch::Approx;

namespace {

// Cyclic Jacobi eigenvalues of a symmetric matrix.
std::vector<double> jacobi_eigenvalues(Matrix a) {
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    return ev;
}

Matrix columns_of(const std::vector<std::vector<double>>& cols) {
    Matrix m(cols[0].size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t t = 0; t < cols[c].size(); ++t) m(t, c) = cols[c][t];
    return m;
}

}  // namespace

TEST_CASE("sharpe identity at rf = 0.01", "[metrics]") {
    CHECK(std::abs(sharpe_ratio(0.072177, 0.079848, 0.01) - 0.778685) <= 1e-5);
    CHECK(std::abs(sharpe_ratio(0.049272, 0.083920, 0.01) - 0.467963) <= 1e-5);
    CHECK_THROWS_AS(sharpe_ratio(0.05, 0.0, 0.01), NumericError);
}

TEST_CASE("compute_metrics formulas", "[metrics]") {
    Rng rng(5);
    auto daily = white_noise(rng, 300, 0.01);
    auto m = compute_metrics(daily);
    const double n = 300;
    double mean = 0;
    for (double r : daily) mean += r;
    mean /= n;
    double ss = 0, down = 0, wins = 0;
    for (double r : daily) {
        ss += (r - mean) * (r - mean);
        down += r < 0 ? r * r : 0.0;
        wins += r > 0;
    }
    const double vol = std::sqrt(ss / (n - 1)) * std::sqrt(252.0);
    CHECK(m.expected_return_ann == Approx(mean * 252).epsilon(1e-12));
    CHECK(m.volatility_ann == Approx(vol).epsilon(1e-12));
    CHECK(*m.sharpe == Approx((mean * 252 - 0.01) / vol).epsilon(1e-12));
    CHECK(*m.sortino == Approx((mean * 252 - 0.01) / (std::sqrt(down / n) * std::sqrt(252.0))).epsilon(1e-12));
    CHECK(m.win_ratio == wins / n);

    // 5th percentile: position 0.05 * 299 = 14.95 between order stats 14 and 15
    auto sorted = daily;
    std::sort(sorted.begin(), sorted.end());
    CHECK(m.var_95 == Approx(sorted[14] + 0.95 * (sorted[15] - sorted[14])).epsilon(1e-12));

    CHECK_THROWS_AS(compute_metrics(std::vector<double>(29, 0.01)), NumericError);
}

TEST_CASE("drawdown", "[metrics]") {
    CHECK(max_drawdown_from_equity(std::vector<double>{1.0, 0.5, 0.75}) == -0.5);
    CHECK(max_drawdown_from_equity(std::vector<double>{1.0, 1.2, 0.9, 1.5, 1.2}) == Approx(-0.25));

    auto m = compute_metrics(std::vector<double>(60, 0.001), {}, UndefinedRatio::Empty);
    CHECK(m.win_ratio == 1.0);
    CHECK(m.max_drawdown == 0.0);
}

TEST_CASE("undefined ratios", "[metrics]") {
    std::vector<double> flat(60, 0.0);
    CHECK_THROWS_AS(compute_metrics(flat), NumericError);
    auto m = compute_metrics(flat, {}, UndefinedRatio::Empty);
    CHECK_FALSE(m.sharpe.has_value());
    CHECK_FALSE(m.sortino.has_value());
    CHECK(m.volatility_ann == 0.0);
    CHECK(m.win_ratio == 0.0);
    CHECK(m.max_drawdown == 0.0);

    std::vector<double> up(60, 0.002);
    CHECK_THROWS_AS(compute_metrics(up), NumericError);
    auto u = compute_metrics(up, {}, UndefinedRatio::Empty);
    CHECK_FALSE(u.sharpe.has_value());
    CHECK_FALSE(u.sortino.has_value());
}

TEST_CASE("metric invariants on random series", "[metrics][property]") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(seed);
        const std::size_t n = 30 + seed * 7;
        auto daily = white_noise(rng, n, 0.02);
        for (auto& r : daily) r += 0.001 * rng.uniform(-1.0, 1.0);
        if (seed % 5 == 0)
            for (std::size_t k = 0; k < n; k += 3) daily[k] = 0.0;  // ties at zero
        auto m = compute_metrics(daily, {}, UndefinedRatio::Empty);
        CHECK(m.volatility_ann >= 0.0);
        CHECK(m.max_drawdown <= 0.0);
        CHECK(m.var_95 <= quantile(daily, 0.5));
        double non_positive = 0;
        for (double r : daily) non_positive += r <= 0.0;
        CHECK(m.win_ratio + non_positive / static_cast<double>(n) == Approx(1.0).epsilon(1e-15));

        std::vector<double> nonneg(n);
        for (std::size_t k = 0; k < n; ++k) nonneg[k] = std::abs(daily[k]);
        CHECK(compute_metrics(nonneg, {}, UndefinedRatio::Empty).max_drawdown == 0.0);
    }
}

TEST_CASE("correlation_matrix", "[metrics]") {
    Rng rng(17);
    auto x = white_noise(rng, 500, 1.0), y = white_noise(rng, 500, 1.0);
    std::vector<double> neg(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) neg[t] = -x[t];

    auto corr = correlation_matrix(columns_of({x, x, neg, y}));
    CHECK(corr(0, 0) == 1.0);
    CHECK(corr(0, 1) == Approx(1.0).epsilon(1e-14));
    CHECK(corr(0, 2) == Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(corr(0, 3)) < 0.15);

    // direct Pearson formula
    double mx = 0, my = 0;
    for (std::size_t t = 0; t < 500; ++t) {
        mx += x[t];
        my += y[t];
    }
    mx /= 500;
    my /= 500;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t t = 0; t < 500; ++t) {
        sxy += (x[t] - mx) * (y[t] - my);
        sxx += (x[t] - mx) * (x[t] - mx);
        syy += (y[t] - my) * (y[t] - my);
    }
    CHECK(corr(0, 3) == Approx(sxy / std::sqrt(sxx * syy)).epsilon(1e-12));

    SECTION("zero-variance columns are undefined") {
        auto c = correlation_matrix(columns_of({x, std::vector<double>(500, 0.0), y}));
        CHECK(std::isnan(c(1, 1)));
        CHECK(std::isnan(c(0, 1)));
        CHECK(std::isnan(c(1, 2)));
        CHECK(c(0, 0) == 1.0);
        CHECK(std::isfinite(c(0, 2)));
    }
    CHECK_THROWS_AS(correlation_matrix(columns_of({x})), NumericError);
}

TEST_CASE("correlation matrices are symmetric PSD", "[metrics][property]") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Rng rng(seed);
        const std::size_t k = 2 + seed % 9, n = 30 + seed * 3;
        std::vector<std::vector<double>> cols;
        auto common = white_noise(rng, n, 1.0);
        for (std::size_t c = 0; c < k; ++c) {
            auto col = white_noise(rng, n, 1.0);
            double w = rng.uniform(-2.0, 2.0);
            for (std::size_t t = 0; t < n; ++t) col[t] += w * common[t];
            cols.push_back(col);
        }
        if (seed % 3 == 0) cols.push_back(cols[0]);  // exactly collinear
        auto corr = correlation_matrix(columns_of(cols));
        for (std::size_t a = 0; a < corr.rows(); ++a)
            for (std::size_t b = 0; b < corr.cols(); ++b) CHECK(corr(a, b) == corr(b, a));
        for (double ev : jacobi_eigenvalues(corr)) CHECK(ev >= -1e-8);
    }
}

TEST_CASE("freedman_diaconis_histogram", "[metrics]") {
    Rng rng(9);
    auto v = white_noise(rng, 1000, 1.0);
    auto h = freedman_diaconis_histogram(v);
    double iqr = quantile(v, 0.75) - quantile(v, 0.25);
    CHECK(h.bin_width == Approx(2.0 * iqr / 10.0).epsilon(1e-12));
    CHECK(h.origin == *std::min_element(v.begin(), v.end()));
    std::size_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == v.size());
    double span = *std::max_element(v.begin(), v.end()) - h.origin;
    CHECK(h.counts.size() == static_cast<std::size_t>(std::floor(span / h.bin_width)) + 1);

    auto flat = freedman_diaconis_histogram(std::vector<double>(50, 0.0));
    CHECK(flat.counts == std::vector<std::size_t>{50});
    CHECK(flat.bin_width == 0.0);

    auto text = histogram_csv(v);
    CHECK(text.rfind("# rule=freedman-diaconis,bin_width=", 0) == 0);
}

TEST_CASE("report emission", "[metrics]") {
    // empty-position backtest: two pairs that never trade
    BacktestResult res;
    res.strategy = StrategyKind::Baseline;
    res.dates = weekdays(ymd(2021, 1, 4), 40);
    res.pair_ids = {"A~B", "C~D"};
    res.per_pair_returns = Matrix(40, 2, 0.0);
    res.positions = Grid<int>(40, 2);
    res.portfolio_returns.assign(40, 0.0);
    auto m = compute_metrics(res.portfolio_returns, {}, UndefinedRatio::Empty);

    auto dir = scratch_dir("report_emission");
    emit_report(res, m, dir);
    auto j = nlohmann::ordered_json::parse(slurp(dir / "metrics_baseline.json"));
    std::vector<std::string> keys;
    for (auto& [k, v] : j["metrics"].items()) keys.push_back(k);
    REQUIRE(keys.size() == kMetricLabels.size());
    for (std::size_t i = 0; i < keys.size(); ++i) CHECK(keys[i] == kMetricLabels[i]);
    CHECK(j["metrics"]["Win-Ratio"] == 0.0);
    CHECK(j["metrics"]["Volatility (Annualized)"] == 0.0);
    CHECK(j["metrics"]["Sharpe Ratio"].is_null());
    CHECK(j["metadata"]["undefined"][0] == "Sharpe Ratio");
    CHECK(j["metadata"]["rf_annual"] == 0.01);

    auto cum = slurp(dir / "cumulative_baseline.csv");
    CHECK(cum.rfind("date,daily_return,cumulative_return\n2021-01-04,0.000000,0.000000\n", 0) == 0);
    auto corr = slurp(dir / "correlation_baseline.csv");
    CHECK(corr == "pair,A~B,C~D\nA~B,NA,NA\nC~D,NA,NA\n");
    CHECK(std::filesystem::exists(dir / "histogram_baseline.csv"));

    // repeated emission is byte-identical
    auto first = slurp(dir / "metrics_baseline.json");
    emit_report(res, m, dir);
    CHECK(slurp(dir / "metrics_baseline.json") == first);

    SECTION("backtest files round trip exactly") {
        Rng rng(4);
        for (std::size_t t = 0; t < 40; ++t) {
            res.per_pair_returns(t, 0) = rng.normal() * 0.01;
            res.positions(t, 0) = static_cast<int>(t % 3) - 1;
            res.portfolio_returns[t] = res.per_pair_returns(t, 0) / 2;
        }
        write_backtest_files(res, dir);
        auto back = read_backtest_files(dir, StrategyKind::Baseline);
        CHECK(back.dates == res.dates);
        CHECK(back.pair_ids == res.pair_ids);
        CHECK(back.positions == res.positions);
        CHECK(same(back.per_pair_returns, res.per_pair_returns));
        CHECK(back.portfolio_returns == res.portfolio_returns);
    }
}
