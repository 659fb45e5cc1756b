#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "pairs/backtest.hpp"
#include "pairs/csv.hpp"
#include "pairs/metrics.hpp"

namespace pairs {

// Row labels of the performance summary, in table order.
inline constexpr std::array<std::string_view, 7> kMetricLabels = {
    "Expected Return (Annualized)", "Volatility (Annualized)", "Sharpe Ratio", "Sortino Ratio",
    "Maximum Drawdown",             "VaR (95%)",               "Win-Ratio",
};

namespace detail {

inline std::string json_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20)
                    out += fmt::format("\\u{:04x}", static_cast<int>(c));
                else
                    out += c;
        }
    }
    return out + "\"";
}

inline std::string json_number(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return "null";
    return csv::fixed6(*v);
}

inline std::string dated_matrix_csv(const std::vector<Date>& dates, const std::vector<std::string>& columns,
                                    auto&& cell) {
    std::string out = "date";
    for (const auto& c : columns) out += "," + c;
    out += '\n';
    for (std::size_t t = 0; t < dates.size(); ++t) {
        out += to_string(dates[t]);
        for (std::size_t c = 0; c < columns.size(); ++c) out += "," + cell(t, c);
        out += '\n';
    }
    return out;
}

}  // namespace detail

inline std::string metrics_json(const MetricsRecord& m, StrategyKind strategy, const MetricsConfig& cfg,
                                std::size_t days, std::size_t pairs) {
    const std::array<std::optional<double>, 7> values = {
        m.expected_return_ann, m.volatility_ann, m.sharpe, m.sortino, m.max_drawdown, m.var_95, m.win_ratio,
    };
    std::string out = "{\n  \"metrics\": {\n";
    std::vector<std::string_view> undefined;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i]) undefined.push_back(kMetricLabels[i]);
        out += "    " + detail::json_string(kMetricLabels[i]) + ": " + detail::json_number(values[i]);
        out += i + 1 < values.size() ? ",\n" : "\n";
    }
    out += "  },\n  \"metadata\": {\n";
    out += "    \"strategy\": " + detail::json_string(to_string(strategy)) + ",\n";
    out += fmt::format("    \"days\": {},\n    \"pairs\": {},\n", days, pairs);
    out += "    \"rf_annual\": " + csv::fixed6(cfg.rf_annual) + ",\n";
    out += "    \"periods_per_year\": " + csv::fixed6(cfg.periods_per_year) + ",\n";
    out += "    \"expected_return\": \"mean daily return * periods_per_year\",\n";
    out += "    \"volatility\": \"sample sd (n-1) of daily returns * sqrt(periods_per_year)\",\n";
    out += "    \"sortino_downside\": \"sqrt(mean(min(r, 0)^2)) * sqrt(periods_per_year), zero daily target\",\n";
    out += "    \"max_drawdown\": \"min equity/peak - 1, equity compounded from 1.0\",\n";
    out += "    \"var_95\": \"5th percentile of daily returns, linear interpolation\",\n";
    out += "    \"win_ratio\": \"fraction of days with return > 0\",\n";
    out += "    \"undefined\": [";
    for (std::size_t i = 0; i < undefined.size(); ++i)
        out += (i ? ", " : "") + detail::json_string(undefined[i]);
    out += "]\n  }\n}\n";
    return out;
}

inline std::string histogram_csv(std::span<const double> daily) {
    auto h = freedman_diaconis_histogram(daily);
    std::string out = fmt::format("# rule=freedman-diaconis,bin_width={},n={}\n", csv::exact(h.bin_width),
                                  daily.size());
    out += "bin_start,bin_end,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        double lo = h.origin + static_cast<double>(b) * h.bin_width;
        out += csv::fixed6(lo) + "," + csv::fixed6(lo + h.bin_width) + "," + std::to_string(h.counts[b]) + "\n";
    }
    return out;
}

inline std::string cumulative_csv(const std::vector<Date>& dates, std::span<const double> daily) {
    std::string out = "date,daily_return,cumulative_return\n";
    double equity = 1.0;
    for (std::size_t t = 0; t < daily.size(); ++t) {
        equity *= 1.0 + daily[t];
        out += to_string(dates[t]) + "," + csv::fixed6(daily[t]) + "," + csv::fixed6(equity - 1.0) + "\n";
    }
    return out;
}

inline std::string correlation_csv(const BacktestResult& result) {
    std::string out = "pair";
    for (const auto& id : result.pair_ids) out += "," + id;
    out += '\n';
    if (result.pair_ids.size() < 2 || result.dates.size() < 30) {
        return "# correlation undefined: needs at least 2 pairs and 30 days\n" + out;
    }
    auto corr = correlation_matrix(result.per_pair_returns);
    for (std::size_t a = 0; a < result.pair_ids.size(); ++a) {
        out += result.pair_ids[a];
        for (std::size_t b = 0; b < result.pair_ids.size(); ++b) out += "," + csv::fixed6(corr(a, b));
        out += '\n';
    }
    return out;
}

// Report files for one strategy: metrics_<tag>.json, cumulative_<tag>.csv,
// histogram_<tag>.csv, correlation_<tag>.csv.
inline void emit_report(const BacktestResult& result, const MetricsRecord& metrics,
                        const std::filesystem::path& out_dir, const MetricsConfig& cfg = {}) {
    std::filesystem::create_directories(out_dir);
    const std::string tag(to_string(result.strategy));
    csv::write_file(out_dir / ("metrics_" + tag + ".json"),
                    metrics_json(metrics, result.strategy, cfg, result.dates.size(), result.pair_ids.size()));
    csv::write_file(out_dir / ("cumulative_" + tag + ".csv"), cumulative_csv(result.dates, result.portfolio_returns));
    csv::write_file(out_dir / ("histogram_" + tag + ".csv"), histogram_csv(result.portfolio_returns));
    csv::write_file(out_dir / ("correlation_" + tag + ".csv"), correlation_csv(result));
}

// Backtest series at full precision: portfolio_returns_<tag>.csv,
// pair_returns_<tag>.csv, positions_<tag>.csv.
inline void write_backtest_files(const BacktestResult& result, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string tag(to_string(result.strategy));
    std::string portfolio = "date,return\n";
    for (std::size_t t = 0; t < result.dates.size(); ++t)
        portfolio += to_string(result.dates[t]) + "," + csv::exact(result.portfolio_returns[t]) + "\n";
    csv::write_file(out_dir / ("portfolio_returns_" + tag + ".csv"), portfolio);
    csv::write_file(out_dir / ("pair_returns_" + tag + ".csv"),
                    detail::dated_matrix_csv(result.dates, result.pair_ids, [&](std::size_t t, std::size_t c) {
                        return csv::exact(result.per_pair_returns(t, c));
                    }));
    csv::write_file(out_dir / ("positions_" + tag + ".csv"),
                    detail::dated_matrix_csv(result.dates, result.pair_ids, [&](std::size_t t, std::size_t c) {
                        return std::to_string(result.positions(t, c));
                    }));
}

inline BacktestResult read_backtest_files(const std::filesystem::path& dir, StrategyKind strategy) {
    const std::string tag(to_string(strategy));
    auto returns = csv::Table::read(dir / ("pair_returns_" + tag + ".csv"));
    auto positions = csv::Table::read(dir / ("positions_" + tag + ".csv"));
    auto portfolio = csv::Table::read(dir / ("portfolio_returns_" + tag + ".csv"));
    BacktestResult result;
    result.strategy = strategy;
    result.pair_ids.assign(returns.header().begin() + 1, returns.header().end());
    const std::size_t days = returns.rows().size(), n = result.pair_ids.size();
    if (positions.rows().size() != days || portfolio.rows().size() != days || positions.header() != returns.header())
        throw DataError("backtest files in '" + dir.string() + "' are inconsistent");
    result.per_pair_returns = Matrix(days, n);
    result.positions = Grid<int>(days, n);
    result.portfolio_returns.resize(days);
    for (std::size_t t = 0; t < days; ++t) {
        auto d = parse_date(returns.cell(t, 0));
        if (!d) throw DataError("bad date in pair_returns_" + tag + ".csv row " + std::to_string(t + 1));
        result.dates.push_back(*d);
        for (std::size_t c = 0; c < n; ++c) {
            result.per_pair_returns(t, c) = returns.number(t, c + 1);
            result.positions(t, c) = static_cast<int>(positions.number(t, c + 1));
        }
        result.portfolio_returns[t] = portfolio.number(t, portfolio.column("return"));
    }
    return result;
}

}  // namespace pairs
