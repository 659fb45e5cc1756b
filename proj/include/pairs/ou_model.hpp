#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "pairs/error.hpp"
#include "pairs/market_data.hpp"
#include "pairs/pair_selection.hpp"
#include "pairs/random.hpp"
#include "pairs/stat_tests.hpp"

namespace pairs {

// Price spread close_i - close_j of a pair, in canonical orientation.
struct Spread {
    std::vector<Date> dates;
    std::vector<double> values;
};

inline Spread make_spread(const PricePanel& panel, const PairCandidate& pair) {
    auto ci = panel.close_series(panel.index_of(pair.sec_i));
    auto cj = panel.close_series(panel.index_of(pair.sec_j));
    Spread spread;
    spread.dates = panel.dates;
    spread.values.resize(ci.size());
    for (std::size_t t = 0; t < ci.size(); ++t) spread.values[t] = ci[t] - cj[t];
    return spread;
}

// S_{t+1} = a S_t + b + eps, sd(eps) = sd_eps.
struct Ar1Fit {
    double a = 0.0;
    double b = 0.0;
    double sd_eps = 0.0;
    double stderr_a = 0.0;
};

// Exact discretisation of dS = lambda (mu - S) dt + sigma dW on a grid of
// step delta. Always construct through ou_from_ar1 or ou_from_continuous so
// both parameterisations stay consistent.
struct OuParams {
    double a = 0.0;
    double b = 0.0;
    double sd_eps = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double delta = 1.0;

    double half_life() const { return std::log(2.0) / lambda; }
    double stationary_sd() const { return sigma / std::sqrt(2.0 * lambda); }
};

inline Ar1Fit fit_ar1(std::span<const double> values) {
    if (values.size() < 30) throw NumericError("fit_ar1: need at least 30 observations");
    auto next = values.subspan(1);
    auto prev = values.first(values.size() - 1);
    auto fit = ols_fit(next, {prev}, true);
    Ar1Fit out;
    out.b = fit.coefficients[0];
    out.a = fit.coefficients[1];
    out.stderr_a = fit.stderr_coeffs[1];
    out.sd_eps = std::sqrt(fit.ssr / static_cast<double>(fit.nobs - 2));
    return out;
}

inline Ar1Fit fit_ar1(const Spread& spread) { return fit_ar1(spread.values); }

inline OuParams ou_from_ar1(double a, double b, double sd_eps, double delta = 1.0) {
    if (!(delta > 0.0)) throw NumericError("ou_from_ar1: delta must be positive");
    if (!(a > 0.0 && a < 1.0)) throw NonMeanReverting(a);
    OuParams p;
    p.a = a;
    p.b = b;
    p.sd_eps = sd_eps;
    p.delta = delta;
    p.lambda = -std::log(a) / delta;
    p.mu = b / (1.0 - a);
    p.sigma = sd_eps * std::sqrt(-2.0 * std::log(a) / (delta * (1.0 - a * a)));
    return p;
}

// Forward map: continuous-time (lambda, mu, sigma) to the AR(1) coefficients.
inline OuParams ou_from_continuous(double lambda, double mu, double sigma, double delta = 1.0) {
    if (!(lambda > 0.0) || !(delta > 0.0) || !(sigma >= 0.0))
        throw NumericError("ou_from_continuous: need lambda > 0, delta > 0, sigma >= 0");
    OuParams p;
    p.lambda = lambda;
    p.mu = mu;
    p.sigma = sigma;
    p.delta = delta;
    p.a = std::exp(-lambda * delta);
    p.b = mu * -std::expm1(-lambda * delta);
    p.sd_eps = sigma * std::sqrt(-std::expm1(-2.0 * lambda * delta) / (2.0 * lambda));
    return p;
}

inline double zscore(double s, const OuParams& params) {
    if (!(params.sigma > 0.0)) throw NumericError("zscore: sigma must be positive");
    return (s - params.mu) / params.sigma;
}

// n points starting at s0: S_{t+1} = a S_t + b + sd_eps * N(0, 1).
inline std::vector<double> simulate_ou(const OuParams& params, std::size_t n, double s0, std::uint64_t seed) {
    if (!(params.lambda > 0.0) || !(params.delta > 0.0))
        throw NumericError("simulate_ou: invalid parameters");
    Rng rng(seed);
    std::vector<double> path;
    path.reserve(n);
    double s = s0;
    for (std::size_t t = 0; t < n; ++t) {
        path.push_back(s);
        s = params.a * s + params.b + params.sd_eps * rng.normal();
    }
    return path;
}

struct RollingStats {
    std::vector<double> mean;
    std::vector<double> sd;  // sample sd, denominator window - 1
};

// Trailing-window mean and sd ending at each t; NaN before the window fills.
// Running add/remove Welford update, recomputed in two passes once per window.
inline RollingStats rolling_stats(std::span<const double> values, std::size_t window) {
    if (window < 2) throw NumericError("rolling_stats: window must be at least 2");
    if (window > values.size())
        throw NumericError("rolling_stats: window " + std::to_string(window) + " exceeds series length " +
                           std::to_string(values.size()));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double w = static_cast<double>(window);
    RollingStats out{std::vector<double>(values.size(), nan), std::vector<double>(values.size(), nan)};
    double mean = 0.0;
    double m2 = 0.0;
    // Two-pass statistics of the window ending at t.
    auto reanchor = [&](std::size_t t) {
        auto win = values.subspan(t + 1 - window, window);
        mean = 0.0;
        for (double v : win) mean += v;
        mean /= w;
        m2 = 0.0;
        for (double v : win) m2 += (v - mean) * (v - mean);
    };
    auto emit = [&](std::size_t t) {
        out.mean[t] = mean;
        out.sd[t] = std::sqrt(std::max(m2, 0.0) / (w - 1.0));
    };
    reanchor(window - 1);
    emit(window - 1);
    for (std::size_t t = window; t < values.size(); ++t) {
        if ((t + 1) % window == 0) {
            reanchor(t);
        } else {
            double x_new = values[t];
            double x_old = values[t - window];
            double old_mean = mean;
            mean += (x_new - x_old) / w;
            m2 += (x_new - x_old) * (x_new - mean + x_old - old_mean);
        }
        emit(t);
    }
    return out;
}

}  // namespace pairs
