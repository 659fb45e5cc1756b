#include <catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace pairs;
using namespace test_util;
using Catch::Approx;

namespace {

// Naive per-window recomputation.
std::pair<double, double> window_mean_sd(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(x.size() - 1))};
}

}  // namespace

TEST_CASE("make_spread", "[ou_model]") {
    auto panel = make_panel({"A", "B"}, {{10, 11}, {8, 8.5}});
    auto s = make_spread(panel, make_pair_candidate("A", "B"));
    REQUIRE(s.values.size() == 2);
    CHECK(s.values[0] == 2.0);
    CHECK(s.values[1] == 2.5);
    CHECK(s.dates == panel.dates);

    // Canonical orientation: the spread is always sec_i - sec_j; swapping
    // the legs of the underlying prices negates it.
    auto swapped = make_panel({"A", "B"}, {{8, 8.5}, {10, 11}});
    auto s2 = make_spread(swapped, make_pair_candidate("B", "A"));
    CHECK(s2.values[0] == -2.0);
    CHECK(s2.values[1] == -2.5);

    auto same_legs = make_panel({"A", "B"}, {{5, 6, 7}, {5, 6, 7}});
    for (double v : make_spread(same_legs, make_pair_candidate("A", "B")).values) CHECK(v == 0.0);
    CHECK_THROWS_AS(make_spread(panel, make_pair_candidate("A", "C")), DataError);
}

TEST_CASE("fit_ar1", "[ou_model]") {
    SECTION("noiseless recursion") {
        std::vector<double> s(60);
        s[0] = 3.0;
        for (std::size_t t = 1; t < s.size(); ++t) s[t] = 0.9 * s[t - 1] + 1.0;
        auto fit = fit_ar1(s);
        CHECK(fit.a == Approx(0.9).margin(1e-10));
        CHECK(fit.b == Approx(1.0).margin(1e-10));
        CHECK(fit.sd_eps == Approx(0.0).margin(1e-10));
    }
    SECTION("simulated path: a within 3 standard errors, and equal to the normal-equation slope") {
        auto p = ou_from_continuous(0.1, 1.5, 0.3);
        auto path = simulate_ou(p, 2000, 1.5, 77);
        auto fit = fit_ar1(path);
        CHECK(std::abs(fit.a - p.a) < 3.0 * fit.stderr_a);
        // independent slope: cov(x_t, x_{t+1}) / var(x_t)
        const std::size_t m = path.size() - 1;
        double mx = 0, my = 0;
        for (std::size_t t = 0; t < m; ++t) {
            mx += path[t];
            my += path[t + 1];
        }
        mx /= m;
        my /= m;
        double sxy = 0, sxx = 0;
        for (std::size_t t = 0; t < m; ++t) {
            sxy += (path[t] - mx) * (path[t + 1] - my);
            sxx += (path[t] - mx) * (path[t] - mx);
        }
        CHECK(fit.a == Approx(sxy / sxx).epsilon(1e-10));
        CHECK(fit.b == Approx(my - (sxy / sxx) * mx).epsilon(1e-8));
    }
    SECTION("degenerate input") {
        CHECK_THROWS_AS(fit_ar1(std::vector<double>(50, 1.0)), NumericError);
        CHECK_THROWS_AS(fit_ar1(std::vector<double>(10, 1.0)), NumericError);
    }
}

TEST_CASE("ou_from_ar1 examples", "[ou_model]") {
    auto p = ou_from_ar1(0.5, 1.0, 0.1, 1.0);
    CHECK(p.lambda == Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(p.mu == Approx(2.0).epsilon(1e-14));
    // sigma = sd_eps * sqrt(2 ln 2 / (1 - a^2)) = 0.1359556...
    CHECK(p.sigma == Approx(0.1 * std::sqrt(2.0 * std::log(2.0) / 0.75)).epsilon(1e-14));
    CHECK(p.sigma == Approx(0.135964).margin(1e-5));
    CHECK(p.half_life() == Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(ou_from_ar1(1.0, 0.0, 0.1), NonMeanReverting);
    CHECK_THROWS_AS(ou_from_ar1(1.2, 0.0, 0.1), NonMeanReverting);
    CHECK_THROWS_AS(ou_from_ar1(-0.3, 0.0, 0.1), NonMeanReverting);
    try {
        ou_from_ar1(1.01, 0.0, 0.1);
    } catch (const NonMeanReverting& e) {
        CHECK(e.slope() == 1.01);
    }
    for (double sd : {0.0, 0.3, 7.0}) CHECK(ou_from_ar1(std::exp(-2.0), 0.0, sd).mu == 0.0);
}

TEST_CASE("OU parameterisations are consistent", "[ou_model][property]") {
    Rng rng(31);
    for (int i = 0; i < 500; ++i) {
        double lambda = std::exp(rng.uniform(std::log(1e-3), std::log(50.0)));
        double mu = rng.uniform(-10, 10);
        double sigma = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
        double delta = rng.uniform() < 0.5 ? 1.0 : 1.0 / 252.0;
        auto p = ou_from_continuous(lambda, mu, sigma, delta);
        CHECK(p.a == Approx(std::exp(-p.lambda * delta)).epsilon(1e-10));
        CHECK(p.b == Approx(p.mu * (1.0 - p.a)).epsilon(1e-10).margin(1e-12));
        auto back = ou_from_ar1(p.a, p.b, p.sd_eps, delta);
        CHECK(back.lambda == Approx(lambda).epsilon(1e-10));
        CHECK(back.mu == Approx(mu).epsilon(1e-10).margin(1e-12));
        CHECK(back.sigma == Approx(sigma).epsilon(1e-10));
    }
}

TEST_CASE("zscore", "[ou_model]") {
    auto p = ou_from_continuous(0.2, 2.0, 0.135964);
    CHECK(zscore(2.0, p) == 0.0);
    CHECK(zscore(2.0 + p.sigma, p) == Approx(1.0).epsilon(1e-14));
    CHECK(zscore(2.5, p) == Approx(3.677).margin(5e-4));
    // affine equivariance: shift spread and mu together
    auto shifted = ou_from_continuous(0.2, 2.0 + 7.5, 0.135964);
    CHECK(zscore(2.5 + 7.5, shifted) == Approx(zscore(2.5, p)).epsilon(1e-12));
    OuParams flat;
    CHECK_THROWS_AS(zscore(1.0, flat), NumericError);
}

TEST_CASE("simulate_ou", "[ou_model]") {
    SECTION("zero noise decays monotonically toward mu") {
        auto p = ou_from_continuous(0.3, 1.0, 0.0);
        auto path = simulate_ou(p, 50, 5.0, 1);
        CHECK(path.size() == 50);
        CHECK(path[0] == 5.0);
        for (std::size_t t = 1; t < path.size(); ++t) {
            CHECK(path[t] < path[t - 1]);
            CHECK(path[t] > 1.0);
        }
        CHECK(path.back() == Approx(1.0).margin(1e-5));
    }
    SECTION("stationary moments for lambda=2, sigma=0.5, delta=1/252") {
        auto p = ou_from_continuous(2.0, 0.0, 0.5, 1.0 / 252.0);
        const std::size_t n = 100000;
        auto path = simulate_ou(p, n, 0.0, 2024);
        double mean = 0.0;
        for (double v : path) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : path) var += (v - mean) * (v - mean);
        var /= (n - 1);
        const double stat_var = p.sigma * p.sigma / (2.0 * p.lambda);
        const double n_eff = n * (1.0 - p.a) / (1.0 + p.a);
        CHECK(std::abs(mean - p.mu) < 3.0 * std::sqrt(stat_var / n_eff));
        CHECK(std::abs(var / stat_var - 1.0) < 0.10);
        CHECK(p.stationary_sd() == Approx(std::sqrt(stat_var)));
    }
    SECTION("same seed, same path") {
        auto p = ou_from_continuous(0.1, 0.0, 1.0);
        CHECK(simulate_ou(p, 100, 0.0, 9) == simulate_ou(p, 100, 0.0, 9));
        CHECK(simulate_ou(p, 100, 0.0, 9) != simulate_ou(p, 100, 0.0, 10));
    }
}

TEST_CASE("rolling_stats", "[ou_model]") {
    SECTION("constant series") {
        std::vector<double> c(20, 4.25);
        auto r = rolling_stats(c, 5);
        for (std::size_t t = 0; t < 4; ++t) CHECK(std::isnan(r.mean[t]));
        for (std::size_t t = 4; t < 20; ++t) {
            CHECK(r.mean[t] == 4.25);
            CHECK(r.sd[t] == 0.0);
        }
    }
    SECTION("alternating +-1, window 2") {
        std::vector<double> x(30);
        for (std::size_t t = 0; t < x.size(); ++t) x[t] = t % 2 ? -1.0 : 1.0;
        auto r = rolling_stats(x, 2);
        for (std::size_t t = 1; t < x.size(); ++t) {
            CHECK(r.mean[t] == Approx(0.0).margin(1e-14));
            CHECK(r.sd[t] == Approx(std::sqrt(2.0)).epsilon(1e-14));
        }
    }
    SECTION("matches naive recomputation") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            Rng rng(seed);
            auto x = random_walk(rng, 500);
            for (std::size_t w : {2u, 30u, 90u}) {
                auto r = rolling_stats(x, w);
                for (std::size_t t = w - 1; t < x.size(); ++t) {
                    auto [m, s] = window_mean_sd(std::span<const double>(x).subspan(t + 1 - w, w));
                    CHECK(std::abs(r.mean[t] - m) <= 1e-10 * std::max(1.0, std::abs(m)));
                    CHECK(std::abs(r.sd[t] - s) <= 1e-10 * std::max(1.0, s));
                }
            }
        }
    }
    SECTION("bad windows") {
        std::vector<double> x(10, 1.0);
        CHECK_THROWS_AS(rolling_stats(x, 1), NumericError);
        CHECK_THROWS_AS(rolling_stats(x, 11), NumericError);
    }
}
