#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pairs/error.hpp"
#include "pairs/grid.hpp"
#include "pairs/market_data.hpp"
#include "pairs/ou_model.hpp"
#include "pairs/pair_selection.hpp"
#include "pairs/strategy.hpp"

namespace pairs {

enum class StrategyKind { Baseline, Ou };

inline std::string_view to_string(StrategyKind kind) { return kind == StrategyKind::Baseline ? "baseline" : "ou"; }

struct BacktestConfig {
    ThresholdConfig thresholds;
    // Charged per unit change of position on the day of the change.
    double trade_cost = 0.0;
    // 0 keeps the trained OU parameters fixed over the test window.
    std::size_t ou_refit_window = 0;

    void validate() const {
        thresholds.validate();
        if (!(trade_cost >= 0.0)) throw ConfigError("trade_cost must be non-negative");
        if (ou_refit_window != 0 && ou_refit_window < 30)
            throw ConfigError("ou_refit_window must be 0 (off) or at least 30");
    }
};

struct SkippedPair {
    std::string pair_id;
    std::string reason;
};

struct BacktestResult {
    StrategyKind strategy = StrategyKind::Baseline;
    std::vector<Date> dates;
    std::vector<std::string> pair_ids;
    Matrix per_pair_returns;  // dates x pairs
    Grid<int> positions;      // dates x pairs
    std::vector<double> portfolio_returns;
    std::vector<SkippedPair> skipped;
    // Active days on which a leg return was missing and booked as 0.
    std::size_t missing_return_days = 0;
};

// r[t] = position[t] * (R_i[t] - R_j[t]) / 2: half the capital long one leg,
// half short the other, earning day t's close-to-close return.
inline std::vector<double> pair_daily_return(std::span<const int> position, const PricePanel& panel,
                                             const PairCandidate& pair, double trade_cost = 0.0,
                                             std::size_t* missing_days = nullptr) {
    if (position.size() != panel.num_dates())
        throw DataError("pair_daily_return: positions are not aligned with the panel dates");
    auto ri = panel.return_series(panel.index_of(pair.sec_i));
    auto rj = panel.return_series(panel.index_of(pair.sec_j));
    std::vector<double> r(position.size(), 0.0);
    int previous = 0;
    for (std::size_t t = 0; t < position.size(); ++t) {
        if (position[t] != 0) {
            double spread_return = ri[t] - rj[t];
            if (std::isfinite(spread_return)) {
                r[t] = position[t] * spread_return / 2.0;
            } else if (missing_days) {
                ++*missing_days;
            }
        }
        if (trade_cost > 0.0) r[t] -= trade_cost * std::abs(position[t] - previous);
        previous = position[t];
    }
    return r;
}

inline std::vector<double> strategy_zscores(std::span<const double> spread, StrategyKind strategy,
                                            const BacktestConfig& cfg, const OuParams* params) {
    if (strategy == StrategyKind::Baseline) return zscore_series_baseline(spread, cfg.thresholds);
    if (cfg.ou_refit_window > 0) return zscore_series_ou_refit(spread, *params, cfg.ou_refit_window);
    return zscore_series_ou(spread, *params);
}

// Signals, positions and returns for every pair over the test panel; the
// portfolio return is the equal-weight mean over all included pairs.
inline BacktestResult run_backtest(const PricePanel& test, const std::vector<PairCandidate>& pairs,
                                   StrategyKind strategy, const BacktestConfig& cfg,
                                   const std::map<std::string, OuParams>& trained = {}) {
    cfg.validate();
    BacktestResult result;
    result.strategy = strategy;
    result.dates = test.dates;
    const std::size_t days = test.num_dates();

    std::vector<std::vector<double>> returns;
    std::vector<std::vector<int>> positions;
    for (const auto& pair : pairs) {
        const OuParams* params = nullptr;
        if (strategy == StrategyKind::Ou) {
            auto it = trained.find(pair.id());
            if (it == trained.end()) {
                result.skipped.push_back({pair.id(), "no trained OU parameters"});
                continue;
            }
            params = &it->second;
        }
        try {
            auto spread = make_spread(test, pair);
            auto z = strategy_zscores(spread.values, strategy, cfg, params);
            auto pct = rolling_percentile(z, cfg.thresholds.pct_window);
            auto pos = generate_positions(pct, cfg.thresholds);
            returns.push_back(pair_daily_return(pos, test, pair, cfg.trade_cost, &result.missing_return_days));
            positions.push_back(std::move(pos));
            result.pair_ids.push_back(pair.id());
        } catch (const NumericError& e) {
            result.skipped.push_back({pair.id(), e.what()});
        } catch (const DataError& e) {
            result.skipped.push_back({pair.id(), e.what()});
        }
    }
    if (result.pair_ids.empty()) {
        std::string why = "no includable pairs for strategy " + std::string(to_string(strategy));
        if (pairs.empty()) why += " (pair list is empty)";
        for (const auto& s : result.skipped) why += "; " + s.pair_id + ": " + s.reason;
        throw PipelineError("backtest", why);
    }

    const std::size_t n = result.pair_ids.size();
    result.per_pair_returns = Matrix(days, n);
    result.positions = Grid<int>(days, n);
    result.portfolio_returns.assign(days, 0.0);
    for (std::size_t t = 0; t < days; ++t) {
        double sum = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            result.per_pair_returns(t, p) = returns[p][t];
            result.positions(t, p) = positions[p][t];
            sum += returns[p][t];
        }
        result.portfolio_returns[t] = sum / static_cast<double>(n);
    }
    return result;
}

}  // namespace pairs
