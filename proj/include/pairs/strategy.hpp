#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "pairs/error.hpp"
#include "pairs/ou_model.hpp"

namespace pairs {

struct ThresholdConfig {
    double upper_pct = 0.75;
    double lower_pct = 0.25;
    double exit_pct = 0.50;
    std::size_t pct_window = 90;
    std::size_t stats_window = 30;  // baseline rolling mean/sd window

    void validate() const {
        if (!(0.0 <= lower_pct && lower_pct < exit_pct && exit_pct < upper_pct && upper_pct <= 1.0))
            throw ConfigError("thresholds must satisfy 0 <= lower_pct < exit_pct < upper_pct <= 1");
        if (pct_window < 10) throw ConfigError("pct_window must be at least 10");
        if (stats_window < 2) throw ConfigError("stats_window must be at least 2");
    }
};

// +1 long spread, -1 short spread, 0 flat.
struct PositionSeries {
    std::vector<Date> dates;
    std::vector<int> position;
};

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

// (S_t - rolling mean) / rolling sd over cfg.stats_window; NaN while the
// window fills and wherever the window sd is zero.
inline std::vector<double> zscore_series_baseline(std::span<const double> spread, const ThresholdConfig& cfg) {
    std::vector<double> z(spread.size(), kUndefined);
    if (spread.size() < cfg.stats_window) return z;
    auto stats = rolling_stats(spread, cfg.stats_window);
    for (std::size_t t = 0; t < spread.size(); ++t)
        if (stats.sd[t] > 0.0) z[t] = (spread[t] - stats.mean[t]) / stats.sd[t];
    return z;
}

inline std::vector<double> zscore_series_ou(std::span<const double> spread, const OuParams& params) {
    if (!(params.sigma > 0.0)) throw NumericError("zscore_series_ou: sigma must be positive");
    std::vector<double> z(spread.size());
    for (std::size_t t = 0; t < spread.size(); ++t) z[t] = zscore(spread[t], params);
    return z;
}

// OU z-scores with parameters refit at each t on the trailing `window`
// spread values; before the first full window, and whenever a refit is not
// mean reverting, the most recent valid parameters are used.
inline std::vector<double> zscore_series_ou_refit(std::span<const double> spread, const OuParams& trained,
                                                  std::size_t window) {
    if (window < 30) throw ConfigError("ou_refit_window must be at least 30");
    OuParams current = trained;
    std::vector<double> z(spread.size());
    for (std::size_t t = 0; t < spread.size(); ++t) {
        if (t + 1 >= window) {
            try {
                auto fit = fit_ar1(spread.subspan(t + 1 - window, window));
                auto p = ou_from_ar1(fit.a, fit.b, fit.sd_eps, trained.delta);
                if (p.sigma > 0.0) current = p;
            } catch (const NumericError&) {
            }
        }
        z[t] = zscore(spread[t], current);
    }
    return z;
}

// Midpoint rank of z[t] within the trailing window z[t-window+1..t]
// (current value included): (#less + 0.5 * #equal) / window. NaN until the
// window holds `window` defined values.
inline std::vector<double> rolling_percentile(std::span<const double> z, std::size_t window) {
    if (window < 10) throw ConfigError("percentile window must be at least 10");
    std::vector<double> pct(z.size(), kUndefined);
    std::vector<double> sorted;  // defined values of the current window
    sorted.reserve(window);
    std::size_t defined_run = 0;
    for (std::size_t t = 0; t < z.size(); ++t) {
        if (t >= window && std::isfinite(z[t - window])) {
            auto it = std::lower_bound(sorted.begin(), sorted.end(), z[t - window]);
            sorted.erase(it);
        }
        if (!std::isfinite(z[t])) {
            defined_run = 0;
            continue;
        }
        sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), z[t]), z[t]);
        if (++defined_run < window) continue;
        auto [lo, hi] = std::equal_range(sorted.begin(), sorted.end(), z[t]);
        double less = static_cast<double>(lo - sorted.begin());
        double equal = static_cast<double>(hi - lo);
        pct[t] = (less + 0.5 * equal) / static_cast<double>(window);
    }
    return pct;
}

// One evaluation of the threshold state machine: the state decided from
// pct[t] becomes the position held on day t+1.
inline int next_position(int current, double pct, const ThresholdConfig& cfg) {
    if (!std::isfinite(pct)) return current;
    switch (current) {
        case 0:
            if (pct > cfg.upper_pct) return -1;
            if (pct < cfg.lower_pct) return +1;
            return 0;
        case -1:
            return pct <= cfg.exit_pct ? 0 : -1;
        default:
            return pct >= cfg.exit_pct ? 0 : +1;
    }
}

inline std::vector<int> generate_positions(std::span<const double> pct, const ThresholdConfig& cfg) {
    std::vector<int> position(pct.size(), 0);
    for (std::size_t t = 0; t + 1 < pct.size(); ++t)
        position[t + 1] = next_position(position[t], pct[t], cfg);
    return position;
}

inline PositionSeries generate_positions(const std::vector<Date>& dates, std::span<const double> pct,
                                         const ThresholdConfig& cfg) {
    return {dates, generate_positions(pct, cfg)};
}

}  // namespace pairs
