#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "pairs/error.hpp"
#include "pairs/grid.hpp"

namespace pairs {

struct MetricsRecord {
    double expected_return_ann = 0.0;
    double volatility_ann = 0.0;
    std::optional<double> sharpe;   // empty when volatility is zero
    std::optional<double> sortino;  // empty when downside deviation is zero
    double max_drawdown = 0.0;
    double var_95 = 0.0;
    double win_ratio = 0.0;
};

struct MetricsConfig {
    double rf_annual = 0.01;
    double periods_per_year = 252.0;
};

// Whether compute_metrics throws on an undefined ratio or leaves it empty.
enum class UndefinedRatio { Throw, Empty };

inline double sharpe_ratio(double expected_return_ann, double volatility_ann, double rf_annual) {
    if (!(volatility_ann > 0.0)) throw NumericError("sharpe ratio undefined: zero volatility");
    return (expected_return_ann - rf_annual) / volatility_ann;
}

// Empirical quantile with linear interpolation between order statistics
// (position q * (n - 1)).
inline double quantile(std::span<const double> values, double q) {
    if (values.empty()) throw NumericError("quantile of an empty series");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// min_t equity[t] / running_peak[t] - 1
inline double max_drawdown_from_equity(std::span<const double> equity) {
    double peak = -std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (double e : equity) {
        peak = std::max(peak, e);
        worst = std::min(worst, e / peak - 1.0);
    }
    return worst;
}

// Equity curve starting from 1 before the first return.
inline std::vector<double> equity_curve(std::span<const double> daily) {
    std::vector<double> equity;
    equity.reserve(daily.size() + 1);
    equity.push_back(1.0);
    for (double r : daily) equity.push_back(equity.back() * (1.0 + r));
    return equity;
}

inline MetricsRecord compute_metrics(std::span<const double> daily, const MetricsConfig& cfg = {},
                                     UndefinedRatio policy = UndefinedRatio::Throw) {
    if (daily.size() < 30)
        throw NumericError("metrics need at least 30 daily returns, got " + std::to_string(daily.size()));
    const double n = static_cast<double>(daily.size());
    const double ann = cfg.periods_per_year;

    MetricsRecord m;
    double mean = std::accumulate(daily.begin(), daily.end(), 0.0) / n;
    double ss = 0.0, downside = 0.0;
    std::size_t wins = 0;
    for (double r : daily) {
        ss += (r - mean) * (r - mean);
        double d = std::min(r, 0.0);
        downside += d * d;
        if (r > 0.0) ++wins;
    }
    auto [lo, hi] = std::minmax_element(daily.begin(), daily.end());
    if (*lo == *hi) ss = 0.0;  // a constant series has exactly zero spread
    m.expected_return_ann = mean * ann;
    m.volatility_ann = std::sqrt(ss / (n - 1.0)) * std::sqrt(ann);
    double downside_ann = std::sqrt(downside / n) * std::sqrt(ann);
    double excess = m.expected_return_ann - cfg.rf_annual;

    if (m.volatility_ann > 0.0)
        m.sharpe = excess / m.volatility_ann;
    else if (policy == UndefinedRatio::Throw)
        throw NumericError("sharpe ratio undefined: zero volatility");
    if (downside_ann > 0.0)
        m.sortino = excess / downside_ann;
    else if (policy == UndefinedRatio::Throw)
        throw NumericError("sortino ratio undefined: zero downside deviation");

    m.max_drawdown = max_drawdown_from_equity(equity_curve(daily));
    m.var_95 = quantile(daily, 0.05);
    m.win_ratio = static_cast<double>(wins) / n;
    return m;
}

// Pearson correlations between columns. Entries involving a zero-variance
// column are NaN (its diagonal included); other diagonal entries are exactly 1.
inline Matrix correlation_matrix(const Matrix& columns) {
    const std::size_t n = columns.rows(), k = columns.cols();
    if (k < 2) throw NumericError("correlation matrix needs at least 2 columns");
    if (n < 30) throw NumericError("correlation matrix needs at least 30 rows");
    std::vector<std::vector<double>> centered(k, std::vector<double>(n));
    std::vector<double> norm(k);
    for (std::size_t c = 0; c < k; ++c) {
        auto col = columns.col(c);
        double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            centered[c][t] = col[t] - mean;
            ss += centered[c][t] * centered[c][t];
        }
        norm[c] = std::sqrt(ss);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Matrix corr(k, k, nan);
    for (std::size_t a = 0; a < k; ++a) {
        if (!(norm[a] > 0.0)) continue;
        corr(a, a) = 1.0;
        for (std::size_t b = a + 1; b < k; ++b) {
            if (!(norm[b] > 0.0)) continue;
            double dot = 0.0;
            for (std::size_t t = 0; t < n; ++t) dot += centered[a][t] * centered[b][t];
            double rho = std::clamp(dot / (norm[a] * norm[b]), -1.0, 1.0);
            corr(a, b) = corr(b, a) = rho;
        }
    }
    return corr;
}

struct Histogram {
    double bin_width = 0.0;
    double origin = 0.0;
    std::vector<std::size_t> counts;  // bin i covers [origin + i*w, origin + (i+1)*w)
};

// Freedman-Diaconis bins: width 2 * IQR * n^(-1/3). A zero IQR (or single
// distinct value) collapses to one bin of width zero at the minimum.
inline Histogram freedman_diaconis_histogram(std::span<const double> values) {
    Histogram h;
    if (values.empty()) return h;
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    double iqr = quantile(values, 0.75) - quantile(values, 0.25);
    h.origin = *lo;
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(values.size()));
    if (!(width > 0.0) || *hi == *lo) {
        h.counts.assign(1, values.size());
        return h;
    }
    h.bin_width = width;
    auto bins = static_cast<std::size_t>(std::floor((*hi - *lo) / width)) + 1;
    h.counts.assign(bins, 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>(std::floor((v - *lo) / width));
        ++h.counts[std::min(b, bins - 1)];
    }
    return h;
}

}  // namespace pairs
