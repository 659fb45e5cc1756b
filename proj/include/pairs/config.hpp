#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>  // nlohmann/json, vendored

#include "pairs/backtest.hpp"
#include "pairs/error.hpp"
#include "pairs/market_data.hpp"
#include "pairs/metrics.hpp"
#include "pairs/stat_tests.hpp"

namespace pairs {

enum class StrategySet { Baseline, Ou, Both };

inline std::vector<StrategyKind> strategies_in(StrategySet set) {
    switch (set) {
        case StrategySet::Baseline: return {StrategyKind::Baseline};
        case StrategySet::Ou: return {StrategyKind::Ou};
        default: return {StrategyKind::Baseline, StrategyKind::Ou};
    }
}

inline StrategySet parse_strategy_set(const std::string& s) {
    if (s == "baseline") return StrategySet::Baseline;
    if (s == "ou") return StrategySet::Ou;
    if (s == "both") return StrategySet::Both;
    throw ConfigError("strategy must be baseline, ou or both (got '" + s + "')");
}

inline std::string to_string(StrategySet s) {
    return s == StrategySet::Baseline ? "baseline" : s == StrategySet::Ou ? "ou" : "both";
}

// Every knob of a run. Loaded from a flat JSON object (comments allowed);
// see README for the key list.
struct RunConfig {
    std::vector<std::string> data_paths;  // as written in the file
    std::filesystem::path base_dir;       // directory relative data paths resolve against
    ColumnMapping columns;
    LoadOptions load;
    UniverseFilter universe;
    PanelOptions panel;
    DateSplit split{Date{std::chrono::year{2018}, std::chrono::January, std::chrono::day{1}},
                    Date{std::chrono::year{2020}, std::chrono::December, std::chrono::day{31}},
                    Date{std::chrono::year{2021}, std::chrono::January, std::chrono::day{1}},
                    Date{std::chrono::year{9999}, std::chrono::December, std::chrono::day{31}}};
    std::size_t max_pairs = 10;
    double alpha = 0.05;
    CointegrationBasis cointegrate_on = CointegrationBasis::Returns;
    double delta = 1.0;
    BacktestConfig backtest;
    StrategySet strategy = StrategySet::Both;
    MetricsConfig metrics;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";

    std::vector<std::filesystem::path> resolved_data_paths() const {
        std::vector<std::filesystem::path> out;
        for (const auto& p : data_paths) {
            std::filesystem::path path(p);
            out.push_back(path.is_absolute() ? path : base_dir / path);
        }
        return out;
    }

    void validate() const {
        universe.validate();
        panel.validate();
        split.validate();
        backtest.validate();
        if (max_pairs == 0) throw ConfigError("max_pairs must be at least 1");
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
        if (!(delta > 0.0)) throw ConfigError("delta must be positive");
        if (!(metrics.periods_per_year > 0.0)) throw ConfigError("periods_per_year must be positive");
    }
};

namespace detail {

inline Date config_date(const nlohmann::json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key + " must be a YYYY-MM-DD string");
    auto d = parse_date(v.get<std::string>());
    if (!d) throw ConfigError(key + ": invalid date '" + v.get<std::string>() + "'");
    return *d;
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig cfg;
    cfg.base_dir = base_dir;
    try {
        for (const auto& [key, v] : j.items()) {
            auto str = [&] { return v.get<std::string>(); };
            auto num = [&] {
                if (!v.is_number()) throw ConfigError(key + " must be a number");
                return v.get<double>();
            };
            auto count = [&] {
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
                    throw ConfigError(key + " must be a non-negative integer");
                return v.get<std::size_t>();
            };
            if (key == "data_paths") {
                cfg.data_paths = v.get<std::vector<std::string>>();
            } else if (key == "data_path") {
                cfg.data_paths = {str()};
            } else if (key == "delimiter") {
                auto s = str();
                if (s.size() != 1) throw ConfigError("delimiter must be a single character");
                cfg.load.delimiter = s[0];
            } else if (key == "lenient") {
                cfg.load.lenient = v.get<bool>();
            } else if (key == "col_infocode") { cfg.columns.infocode = str();
            } else if (key == "col_dscode") { cfg.columns.dscode = str();
            } else if (key == "col_isin") { cfg.columns.isin = str();
            } else if (key == "col_ticker") { cfg.columns.ticker = str();
            } else if (key == "col_name") { cfg.columns.name = str();
            } else if (key == "col_region") { cfg.columns.region = str();
            } else if (key == "col_currency") { cfg.columns.currency = str();
            } else if (key == "col_marketdate") { cfg.columns.marketdate = str();
            } else if (key == "col_adjclose") { cfg.columns.adjclose = str();
            } else if (key == "col_marketcap") { cfg.columns.marketcap = str();
            } else if (key == "col_general_industry") { cfg.columns.general_industry = str();
            } else if (key == "col_industry_group") { cfg.columns.industry_group = str();
            } else if (key == "min_marketcap") { cfg.universe.min_marketcap = num();
            } else if (key == "region") { cfg.universe.region = str();
            } else if (key == "currency") { cfg.universe.currency = str();
            } else if (key == "start_date") { cfg.universe.start_date = detail::config_date(v, key);
            } else if (key == "min_coverage") { cfg.panel.min_coverage = num();
            } else if (key == "max_ffill_days") { cfg.panel.max_ffill_days = count();
            } else if (key == "min_trading_fraction") { cfg.panel.min_trading_fraction = num();
            } else if (key == "train_start") { cfg.split.train_start = detail::config_date(v, key);
            } else if (key == "train_end") { cfg.split.train_end = detail::config_date(v, key);
            } else if (key == "test_start") { cfg.split.test_start = detail::config_date(v, key);
            } else if (key == "test_end") { cfg.split.test_end = detail::config_date(v, key);
            } else if (key == "max_pairs") { cfg.max_pairs = count();
            } else if (key == "alpha") { cfg.alpha = num();
            } else if (key == "cointegrate_on") {
                auto s = str();
                if (s == "returns") cfg.cointegrate_on = CointegrationBasis::Returns;
                else if (s == "prices") cfg.cointegrate_on = CointegrationBasis::Prices;
                else throw ConfigError("cointegrate_on must be returns or prices");
            } else if (key == "delta") { cfg.delta = num();
            } else if (key == "upper_pct") { cfg.backtest.thresholds.upper_pct = num();
            } else if (key == "lower_pct") { cfg.backtest.thresholds.lower_pct = num();
            } else if (key == "exit_pct") { cfg.backtest.thresholds.exit_pct = num();
            } else if (key == "pct_window") { cfg.backtest.thresholds.pct_window = count();
            } else if (key == "stats_window") { cfg.backtest.thresholds.stats_window = count();
            } else if (key == "trade_cost") { cfg.backtest.trade_cost = num();
            } else if (key == "ou_refit_window") { cfg.backtest.ou_refit_window = count();
            } else if (key == "strategy") { cfg.strategy = parse_strategy_set(str());
            } else if (key == "rf_annual") { cfg.metrics.rf_annual = num();
            } else if (key == "periods_per_year") { cfg.metrics.periods_per_year = num();
            } else if (key == "seed") { cfg.seed = v.get<std::uint64_t>();
            } else if (key == "out_dir") { cfg.out_dir = str();
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config value has the wrong type: ") + e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

// Every effective setting, in a fixed key order.
inline nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["data_paths"] = cfg.data_paths;
    j["delimiter"] = std::string(1, cfg.load.delimiter);
    j["lenient"] = cfg.load.lenient;
    j["col_infocode"] = cfg.columns.infocode;
    j["col_dscode"] = cfg.columns.dscode;
    j["col_isin"] = cfg.columns.isin;
    j["col_ticker"] = cfg.columns.ticker;
    j["col_name"] = cfg.columns.name;
    j["col_region"] = cfg.columns.region;
    j["col_currency"] = cfg.columns.currency;
    j["col_marketdate"] = cfg.columns.marketdate;
    j["col_adjclose"] = cfg.columns.adjclose;
    j["col_marketcap"] = cfg.columns.marketcap;
    j["col_general_industry"] = cfg.columns.general_industry;
    j["col_industry_group"] = cfg.columns.industry_group;
    j["min_marketcap"] = cfg.universe.min_marketcap;
    j["region"] = cfg.universe.region;
    j["currency"] = cfg.universe.currency;
    j["start_date"] = to_string(cfg.universe.start_date);
    j["min_coverage"] = cfg.panel.min_coverage;
    j["max_ffill_days"] = cfg.panel.max_ffill_days;
    j["min_trading_fraction"] = cfg.panel.min_trading_fraction;
    j["train_start"] = to_string(cfg.split.train_start);
    j["train_end"] = to_string(cfg.split.train_end);
    j["test_start"] = to_string(cfg.split.test_start);
    j["test_end"] = to_string(cfg.split.test_end);
    j["max_pairs"] = cfg.max_pairs;
    j["alpha"] = cfg.alpha;
    j["cointegrate_on"] = cfg.cointegrate_on == CointegrationBasis::Returns ? "returns" : "prices";
    j["delta"] = cfg.delta;
    j["upper_pct"] = cfg.backtest.thresholds.upper_pct;
    j["lower_pct"] = cfg.backtest.thresholds.lower_pct;
    j["exit_pct"] = cfg.backtest.thresholds.exit_pct;
    j["pct_window"] = cfg.backtest.thresholds.pct_window;
    j["stats_window"] = cfg.backtest.thresholds.stats_window;
    j["trade_cost"] = cfg.backtest.trade_cost;
    j["ou_refit_window"] = cfg.backtest.ou_refit_window;
    j["strategy"] = to_string(cfg.strategy);
    j["rf_annual"] = cfg.metrics.rf_annual;
    j["periods_per_year"] = cfg.metrics.periods_per_year;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir.generic_string();
    return j;
}

}  // namespace pairs
