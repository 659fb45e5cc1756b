#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>  // nlohmann/json, vendored

#include "pairs/backtest.hpp"
#include "pairs/config.hpp"
#include "pairs/csv.hpp"
#include "pairs/market_data.hpp"
#include "pairs/metrics.hpp"
#include "pairs/ou_model.hpp"
#include "pairs/pair_selection.hpp"
#include "pairs/random.hpp"
#include "pairs/report.hpp"
#include "pairs/stat_tests.hpp"

namespace pairs {

inline constexpr std::string_view kVersion = "1.0.0";

// Fixed output file names, shared by `run` and the per-stage commands.
namespace files {
inline constexpr std::string_view kPanel = "panel.csv";
inline constexpr std::string_view kRankedPairs = "pairs_ranked.csv";
inline constexpr std::string_view kSelectedPairs = "pairs_selected.csv";
inline constexpr std::string_view kValidatedPairs = "pairs_validated.csv";
inline constexpr std::string_view kOuParams = "ou_params.csv";
inline constexpr std::string_view kManifest = "run_manifest.json";
}  // namespace files

// ---------------------------------------------------------------- ingest

struct IngestResult {
    PricePanel panel;
    std::size_t rows_read = 0;
    std::size_t duplicates_dropped = 0;
    std::size_t records_loaded = 0;
    std::size_t records_after_filter = 0;
    std::vector<std::string> skipped_rows;
    std::vector<DroppedSecurity> dropped;
};

inline IngestResult ingest(const RunConfig& cfg) {
    if (cfg.data_paths.empty()) throw ConfigError("no data_paths configured");
    IngestResult out;
    std::vector<SecurityRecord> records;
    for (const auto& path : cfg.resolved_data_paths()) {
        auto loaded = load_records(path, cfg.columns, cfg.load);
        out.rows_read += loaded.rows_read;
        out.duplicates_dropped += loaded.duplicates_dropped;
        for (const auto& issue : loaded.skipped)
            out.skipped_rows.push_back(fmt::format("{} row {}: {}", path.filename().string(), issue.row, issue.message));
        records.insert(records.end(), std::make_move_iterator(loaded.records.begin()),
                       std::make_move_iterator(loaded.records.end()));
    }
    out.duplicates_dropped += deduplicate(records);
    out.records_loaded = records.size();
    auto filtered = filter_universe(records, cfg.universe);
    out.records_after_filter = filtered.size();
    if (filtered.empty()) throw DataError("no records pass the universe filter");
    out.panel = build_panel(filtered, cfg.panel, &out.dropped);
    return out;
}

// ------------------------------------------------------------ pair files

inline std::string ranked_pairs_csv(const std::vector<PairCandidate>& ranked) {
    std::string out = "rank,sec_i,sec_j,msd\n";
    for (std::size_t r = 0; r < ranked.size(); ++r)
        out += fmt::format("{},{},{},{}\n", r + 1, csv::quote(ranked[r].sec_i), csv::quote(ranked[r].sec_j),
                           csv::exact(ranked[r].msd));
    return out;
}

inline std::string pairs_csv(const std::vector<PairCandidate>& pairs) {
    std::string out = "sec_i,sec_j,msd,coint_stat,p_value,retained,reason,review_label\n";
    for (const auto& p : pairs) {
        out += csv::quote(p.sec_i) + "," + csv::quote(p.sec_j) + "," + csv::exact(p.msd) + ",";
        out += (p.coint_stat ? csv::exact(*p.coint_stat) : std::string(csv::kMissing)) + ",";
        out += (p.p_value ? csv::exact(*p.p_value) : std::string(csv::kMissing)) + ",";
        out += std::string(p.retained ? "1" : "0") + "," + csv::quote(p.reject_reason) + ",";
        out += csv::quote(p.review_label.value_or("")) + "\n";
    }
    return out;
}

// Reads pairs_csv output. Only sec_i, sec_j and msd are required; a
// hand-edited review_label column is carried through.
inline std::vector<PairCandidate> read_pairs_csv(const std::filesystem::path& path) {
    auto table = csv::Table::read(path);
    auto ci = table.column("sec_i"), cj = table.column("sec_j"), cm = table.column("msd");
    auto optional_col = [&](std::string_view name) -> std::optional<std::size_t> {
        const auto& h = table.header();
        for (std::size_t k = 0; k < h.size(); ++k)
            if (h[k] == name) return k;
        return std::nullopt;
    };
    auto cs = optional_col("coint_stat"), cp = optional_col("p_value"), cr = optional_col("retained"),
         cw = optional_col("reason"), cl = optional_col("review_label");
    std::vector<PairCandidate> pairs;
    for (std::size_t r = 0; r < table.rows().size(); ++r) {
        auto p = make_pair_candidate(table.cell(r, ci), table.cell(r, cj), table.number(r, cm));
        if (cs && table.cell(r, *cs) != csv::kMissing) p.coint_stat = table.number(r, *cs);
        if (cp && table.cell(r, *cp) != csv::kMissing) p.p_value = table.number(r, *cp);
        if (cr) p.retained = table.cell(r, *cr) == "1";
        if (cw) p.reject_reason = table.cell(r, *cw);
        if (cl && !table.cell(r, *cl).empty()) p.review_label = table.cell(r, *cl);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

inline std::vector<PairCandidate> retained_only(const std::vector<PairCandidate>& pairs) {
    std::vector<PairCandidate> out;
    for (const auto& p : pairs)
        if (p.retained) out.push_back(p);
    return out;
}

// ------------------------------------------------------------ calibration

struct CalibrationRow {
    PairCandidate pair;
    std::optional<Ar1Fit> ar1;
    std::optional<OuParams> params;
    std::string reason;  // why params is empty
};

// AR(1) fit of each pair's training spread, inverted to OU parameters.
// Pairs with a slope outside (0, 1) or a zero residual sd are excluded.
inline std::vector<CalibrationRow> calibrate_pairs(const std::vector<PairCandidate>& pairs, const PricePanel& train,
                                                   double delta) {
    std::vector<CalibrationRow> rows;
    for (const auto& pair : pairs) {
        CalibrationRow row{pair, std::nullopt, std::nullopt, {}};
        try {
            auto fit = fit_ar1(make_spread(train, pair));
            row.ar1 = fit;
            auto params = ou_from_ar1(fit.a, fit.b, fit.sd_eps, delta);
            if (!(params.sigma > 0.0))
                row.reason = "zero residual sd";
            else
                row.params = params;
        } catch (const std::exception& e) {
            row.reason = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::map<std::string, OuParams> params_by_pair(const std::vector<CalibrationRow>& rows) {
    std::map<std::string, OuParams> out;
    for (const auto& row : rows)
        if (row.params) out.emplace(row.pair.id(), *row.params);
    return out;
}

inline std::string calibration_csv(const std::vector<CalibrationRow>& rows) {
    std::string out = "pair,sec_i,sec_j,status,a,b,sd_eps,lambda,mu,sigma,half_life,delta,reason\n";
    for (const auto& row : rows) {
        const auto& p = row.pair;
        out += csv::quote(p.id()) + "," + csv::quote(p.sec_i) + "," + csv::quote(p.sec_j) + ",";
        if (row.params) {
            const auto& o = *row.params;
            out += "ok," + csv::exact(o.a) + "," + csv::exact(o.b) + "," + csv::exact(o.sd_eps) + "," +
                   csv::exact(o.lambda) + "," + csv::exact(o.mu) + "," + csv::exact(o.sigma) + "," +
                   csv::exact(o.half_life()) + "," + csv::exact(o.delta) + ",\n";
        } else {
            std::string na(csv::kMissing);
            std::string a = row.ar1 ? csv::exact(row.ar1->a) : na;
            std::string b = row.ar1 ? csv::exact(row.ar1->b) : na;
            std::string s = row.ar1 ? csv::exact(row.ar1->sd_eps) : na;
            out += "excluded," + a + "," + b + "," + s + "," + na + "," + na + "," + na + "," + na + "," + na + "," +
                   csv::quote(row.reason) + "\n";
        }
    }
    return out;
}

// Rebuilds OU parameters from the stored AR(1) coefficients of `ok` rows.
inline std::map<std::string, OuParams> read_calibration_csv(const std::filesystem::path& path) {
    auto table = csv::Table::read(path);
    auto c_pair = table.column("pair"), c_status = table.column("status"), c_a = table.column("a"),
         c_b = table.column("b"), c_s = table.column("sd_eps"), c_d = table.column("delta");
    std::map<std::string, OuParams> out;
    for (std::size_t r = 0; r < table.rows().size(); ++r) {
        if (table.cell(r, c_status) != "ok") continue;
        out.emplace(table.cell(r, c_pair), ou_from_ar1(table.number(r, c_a), table.number(r, c_b),
                                                       table.number(r, c_s), table.number(r, c_d)));
    }
    return out;
}

// ------------------------------------------------------------ stages

struct Selection {
    PricePanel train;
    PricePanel test;
    std::vector<PairCandidate> ranked;
    std::vector<PairCandidate> selected;
};

inline Selection select_stage(const RunConfig& cfg, const PricePanel& panel) {
    Selection s;
    std::tie(s.train, s.test) = split_panel(panel, cfg.split);
    s.ranked = rank_pairs(s.train);
    s.selected = greedy_disjoint(s.ranked, cfg.max_pairs);
    return s;
}

inline std::vector<PairCandidate> validate_stage(const RunConfig& cfg, const PricePanel& train,
                                                 const std::vector<PairCandidate>& selected) {
    auto validated = validate_pairs(selected, train, cfg.alpha, cfg.cointegrate_on);
    if (retained_only(validated).empty()) throw PipelineError("validate", "no retained pairs");
    return validated;
}

struct StrategyOutcome {
    BacktestResult backtest;
    MetricsRecord metrics;
};

inline MetricsRecord report_stage(const RunConfig& cfg, const BacktestResult& result,
                                  const std::filesystem::path& out_dir) {
    auto metrics = compute_metrics(result.portfolio_returns, cfg.metrics, UndefinedRatio::Empty);
    emit_report(result, metrics, out_dir, cfg.metrics);
    return metrics;
}

// ------------------------------------------------------------ manifest

inline nlohmann::ordered_json defaults_in_effect(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["universe_filter"] = "market cap, region and currency checked once on each security's first date >= start_date";
    j["panel_dates"] = fmt::format("dates on which at least {} of securities trade", csv::exact(cfg.panel.min_trading_fraction));
    j["missing_prices"] = fmt::format("forward-filled up to {} consecutive days; securities must trade on the first panel date",
                                      cfg.panel.max_ffill_days);
    j["returns"] = "simple returns close_t / close_t-1 - 1";
    j["pair_selection"] = "ascending MSD of training returns, greedy disjoint, ties by (sec_i, sec_j)";
    j["cointegration"] = std::string("Engle-Granger on training ") +
                         (cfg.cointegrate_on == CointegrationBasis::Returns ? "returns" : "prices") +
                         ", sec_i regressed on sec_j with intercept";
    j["adf_lags"] = "AIC over 0..floor(12*(n/100)^0.25) on a common sample";
    j["p_values"] = "MacKinnon response surface; Engle-Granger uses the 2-variable constant-term surface";
    j["ou_fit"] = "AR(1) of the training spread fitted once, held fixed over the test window";
    j["ou_refit_window"] = cfg.backtest.ou_refit_window;
    j["ou_delta"] = cfg.delta;
    j["percentile"] = "trailing window including the current value, midpoint ties";
    j["signals"] = "enter short above upper_pct, long below lower_pct; exit at exit_pct (<= for shorts, >= for longs)";
    j["execution"] = "decisions on day t take effect on day t+1 (entries and exits)";
    j["pnl"] = "position * (R_i - R_j) / 2 per active day; portfolio = equal-weight mean over included pairs";
    j["trade_cost"] = cfg.backtest.trade_cost;
    j["rf_annual"] = cfg.metrics.rf_annual;
    j["periods_per_year"] = cfg.metrics.periods_per_year;
    j["sortino_target"] = "zero daily return";
    return j;
}

struct RunSummary {
    IngestResult ingest;
    Selection selection;
    std::vector<PairCandidate> validated;
    std::vector<CalibrationRow> calibration;
    std::vector<StrategyOutcome> strategies;
};

// ingest -> filter -> panel -> split -> select -> validate -> calibrate ->
// backtest -> metrics -> reports, writing every artifact into cfg.out_dir.
// A manifest is written on success and on failure (status "failed"); on
// failure the stage name is also stored in *failed_stage when given.
inline RunSummary run_pipeline(const RunConfig& cfg, std::string* failed_stage = nullptr) {
    namespace fs = std::filesystem;
    const fs::path out = cfg.out_dir;
    RunSummary run;
    nlohmann::ordered_json manifest;
    manifest["tool"] = "pairs";
    manifest["version"] = std::string(kVersion);
    manifest["status"] = "incomplete";
    manifest["seed"] = cfg.seed;
    manifest["config"] = config_to_json(cfg);
    manifest["defaults_in_effect"] = defaults_in_effect(cfg);
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    nlohmann::ordered_json dropped_pairs = nlohmann::ordered_json::array();
    nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
    std::string stage = "config";

    auto write = [&](std::string_view name, const std::string& content) {
        csv::write_file(out / name, content);
        outputs.push_back(std::string(name));
    };
    auto finish = [&](const std::string& status) {
        manifest["status"] = status;
        manifest["counts"] = counts;
        manifest["dropped_pairs"] = dropped_pairs;
        manifest["outputs"] = outputs;
        csv::write_file(out / files::kManifest, manifest.dump(2) + "\n");
    };

    try {
        cfg.validate();
        fs::create_directories(out);

        stage = "ingest";
        run.ingest = ingest(cfg);
        counts["rows_read"] = run.ingest.rows_read;
        counts["duplicates_dropped"] = run.ingest.duplicates_dropped;
        counts["rows_skipped"] = run.ingest.skipped_rows.size();
        counts["records_loaded"] = run.ingest.records_loaded;
        counts["records_after_filter"] = run.ingest.records_after_filter;
        counts["panel_dates"] = run.ingest.panel.num_dates();
        counts["panel_securities"] = run.ingest.panel.num_securities();
        manifest["skipped_rows"] = run.ingest.skipped_rows;
        nlohmann::ordered_json dropped_secs = nlohmann::ordered_json::array();
        for (const auto& d : run.ingest.dropped) dropped_secs.push_back({{"security", d.id}, {"reason", d.reason}});
        manifest["dropped_securities"] = dropped_secs;
        write(files::kPanel, panel_to_csv(run.ingest.panel));

        stage = "select";
        run.selection = select_stage(cfg, run.ingest.panel);
        counts["train_dates"] = run.selection.train.num_dates();
        counts["test_dates"] = run.selection.test.num_dates();
        counts["pairs_ranked"] = run.selection.ranked.size();
        counts["pairs_selected"] = run.selection.selected.size();
        write(files::kRankedPairs, ranked_pairs_csv(run.selection.ranked));
        write(files::kSelectedPairs, pairs_csv(run.selection.selected));

        stage = "validate";
        run.validated = validate_pairs(run.selection.selected, run.selection.train, cfg.alpha, cfg.cointegrate_on);
        for (const auto& p : run.validated)
            if (!p.retained) dropped_pairs.push_back({{"pair", p.id()}, {"stage", "validate"}, {"reason", p.reject_reason}});
        auto retained = retained_only(run.validated);
        counts["pairs_retained"] = retained.size();
        write(files::kValidatedPairs, pairs_csv(run.validated));
        if (retained.empty()) throw PipelineError("validate", "no retained pairs");

        stage = "calibrate";
        run.calibration = calibrate_pairs(retained, run.selection.train, cfg.delta);
        auto params = params_by_pair(run.calibration);
        for (const auto& row : run.calibration)
            if (!row.params) dropped_pairs.push_back({{"pair", row.pair.id()}, {"stage", "calibrate"}, {"reason", row.reason}});
        counts["pairs_calibrated"] = params.size();
        write(files::kOuParams, calibration_csv(run.calibration));

        for (auto strategy : strategies_in(cfg.strategy)) {
            const std::string tag(to_string(strategy));
            stage = "backtest";
            StrategyOutcome outcome;
            outcome.backtest = run_backtest(run.selection.test, retained, strategy, cfg.backtest, params);
            for (const auto& s : outcome.backtest.skipped)
                dropped_pairs.push_back({{"pair", s.pair_id}, {"stage", "backtest_" + tag}, {"reason", s.reason}});
            counts["pairs_traded_" + tag] = outcome.backtest.pair_ids.size();
            counts["missing_return_days_" + tag] = outcome.backtest.missing_return_days;
            write_backtest_files(outcome.backtest, out);
            for (auto prefix : {"portfolio_returns_", "pair_returns_", "positions_"})
                outputs.push_back(prefix + tag + ".csv");

            stage = "report";
            outcome.metrics = report_stage(cfg, outcome.backtest, out);
            for (auto prefix : {"metrics_", "cumulative_", "histogram_", "correlation_"})
                outputs.push_back(prefix + tag + (std::string_view(prefix) == "metrics_" ? ".json" : ".csv"));
            run.strategies.push_back(std::move(outcome));
        }
    } catch (const std::exception& e) {
        manifest["failed_stage"] = stage;
        if (failed_stage) *failed_stage = stage;
        manifest["error"] = e.what();
        try {
            fs::create_directories(out);
            finish("failed");
        } catch (...) {
        }
        if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DataError*>(&e) ||
            dynamic_cast<const PipelineError*>(&e))
            throw;
        throw PipelineError(stage, e.what());
    }
    finish("complete");
    return run;
}

// ------------------------------------------------------------ synthetic data

// splitmix64 step; derives independent sub-seeds from one master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct SynthConfig {
    std::size_t n_pairs = 10;
    std::size_t n_days = 750;
    std::size_t n_decoys = 4;
    std::uint64_t seed = 1;
    // Spread OU parameters are drawn uniformly from these ranges; lambda is
    // per year of 252 days, the stationary sd and mu are in USD.
    double lambda_min_ann = 20.0;
    double lambda_max_ann = 60.0;
    double spread_sd_min = 0.5;
    double spread_sd_max = 2.0;
    double mu_abs_max = 2.0;
    double price_min = 40.0;
    double price_max = 160.0;
    double daily_vol = 0.015;
    double train_fraction = 2.0 / 3.0;
    Date start{std::chrono::year{2018}, std::chrono::January, std::chrono::day{2}};

    void validate() const {
        if (n_pairs < 1) throw ConfigError("synth needs n_pairs >= 1");
        if (n_days < 60) throw ConfigError("synth needs n_days >= 60");
        if (!(lambda_min_ann > 0.0 && lambda_min_ann <= lambda_max_ann)) throw ConfigError("bad lambda range");
        if (!(spread_sd_min > 0.0 && spread_sd_min <= spread_sd_max)) throw ConfigError("bad spread sd range");
        if (!(price_min > 0.0 && price_min <= price_max)) throw ConfigError("bad price range");
        if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
    }
};

// Geometric random walk with zero drift.
inline std::vector<double> synth_walk(double start, double daily_vol, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> path(n);
    double p = start;
    for (std::size_t t = 0; t < n; ++t) {
        path[t] = p;
        p *= std::exp(daily_vol * rng.normal() - 0.5 * daily_vol * daily_vol);
    }
    return path;
}

struct SynthPair {
    std::vector<double> leg_i;  // leg_j + spread
    std::vector<double> leg_j;  // random walk
    OuParams spread;            // daily parameters (delta = 1)
};

inline SynthPair synth_pair(const SynthConfig& cfg, std::uint64_t seed) {
    Rng draw(derive_seed(seed, 0));
    double lambda = draw.uniform(cfg.lambda_min_ann, cfg.lambda_max_ann) / 252.0;
    double sd = draw.uniform(cfg.spread_sd_min, cfg.spread_sd_max);
    double mu = draw.uniform(-cfg.mu_abs_max, cfg.mu_abs_max);
    double start = draw.uniform(cfg.price_min, cfg.price_max);
    SynthPair pair;
    pair.spread = ou_from_continuous(lambda, mu, sd * std::sqrt(2.0 * lambda), 1.0);
    auto spread = simulate_ou(pair.spread, cfg.n_days, mu, derive_seed(seed, 1));
    // Redraw the common leg until both legs stay comfortably positive.
    for (std::uint64_t attempt = 0;; ++attempt) {
        pair.leg_j = synth_walk(start, cfg.daily_vol, cfg.n_days, derive_seed(seed, 2 + attempt));
        pair.leg_i.resize(cfg.n_days);
        bool ok = true;
        for (std::size_t t = 0; t < cfg.n_days; ++t) {
            pair.leg_i[t] = pair.leg_j[t] + spread[t];
            ok = ok && pair.leg_i[t] > 1.0 && pair.leg_j[t] > 1.0;
        }
        if (ok) break;
    }
    return pair;
}

struct SynthOutput {
    std::vector<Date> dates;
    std::vector<SecurityRecord> records;
    std::vector<std::pair<std::string, OuParams>> truth;  // pair id -> spread parameters
    RunConfig config;                                     // run config matching the files
};

// n_pairs cointegrated pairs (SYNppA = SYNppB + OU spread) plus n_decoys
// independent walks (DECdd), on consecutive weekdays from cfg.start.
inline SynthOutput generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    SynthOutput out;
    out.dates.push_back(is_weekday(cfg.start) ? cfg.start : next_weekday(cfg.start));
    while (out.dates.size() < cfg.n_days) out.dates.push_back(next_weekday(out.dates.back()));

    std::size_t infocode = 10000;
    auto emit = [&](const std::string& dscode, const std::string& ticker, const std::vector<double>& prices,
                    double shares) {
        ++infocode;
        for (std::size_t t = 0; t < cfg.n_days; ++t) {
            SecurityRecord rec;
            rec.infocode = std::to_string(infocode);
            rec.dscode = dscode;
            rec.isin = "XS" + fmt::format("{:010d}", infocode);
            rec.ticker = ticker;
            rec.name = "SYNTHETIC " + ticker;
            rec.region = "US";
            rec.currency = "USD";
            rec.marketdate = out.dates[t];
            rec.adjclose = std::round(prices[t] * 1e6) / 1e6;
            rec.marketcap = std::round(prices[t] * shares);
            rec.general_industry = "SYNTHETIC";
            rec.industry_group = ticker.substr(0, 3);
            out.records.push_back(std::move(rec));
        }
    };
    Rng shares_rng(derive_seed(cfg.seed, 999));
    for (std::size_t p = 0; p < cfg.n_pairs; ++p) {
        auto pair = synth_pair(cfg, derive_seed(cfg.seed, 1000 + p));
        auto base = fmt::format("SYN{:02d}", p + 1);
        emit(base + "A", fmt::format("P{:02d}A", p + 1), pair.leg_i, shares_rng.uniform(1e8, 1e9));
        emit(base + "B", fmt::format("P{:02d}B", p + 1), pair.leg_j, shares_rng.uniform(1e8, 1e9));
        out.truth.emplace_back(base + "A~" + base + "B", pair.spread);
    }
    for (std::size_t d = 0; d < cfg.n_decoys; ++d) {
        Rng draw(derive_seed(cfg.seed, 5000 + d));
        auto walk = synth_walk(draw.uniform(cfg.price_min, cfg.price_max), cfg.daily_vol, cfg.n_days,
                               derive_seed(cfg.seed, 6000 + d));
        emit(fmt::format("DEC{:02d}", d + 1), fmt::format("D{:02d}", d + 1), walk, shares_rng.uniform(1e8, 1e9));
    }

    auto n_train = static_cast<std::size_t>(std::round(cfg.train_fraction * static_cast<double>(cfg.n_days)));
    n_train = std::clamp<std::size_t>(n_train, 1, cfg.n_days - 1);
    out.config.data_paths = {"prices.csv"};
    out.config.universe.start_date = out.dates.front();
    out.config.split = {out.dates.front(), out.dates[n_train - 1], out.dates[n_train], out.dates.back()};
    out.config.seed = cfg.seed;
    return out;
}

inline std::string records_csv(const std::vector<SecurityRecord>& records) {
    std::string out =
        "infocode,dscode,isin,ticker,dssecname,region,currency,marketdate,adjclose,marketcap,"
        "general_industry_desc,industry_group_desc\n";
    for (const auto& r : records) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", csv::quote(r.infocode), csv::quote(r.dscode),
                           csv::quote(r.isin), csv::quote(r.ticker), csv::quote(r.name), csv::quote(r.region),
                           csv::quote(r.currency), to_string(r.marketdate),
                           r.adjclose ? csv::fixed6(*r.adjclose) : std::string(),
                           r.marketcap ? fmt::format("{:.0f}", *r.marketcap) : std::string(),
                           csv::quote(r.general_industry), csv::quote(r.industry_group));
    }
    return out;
}

// Writes prices.csv, config.json and synth_truth.csv into out_dir.
inline SynthOutput write_synthetic(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
    auto out = generate_synthetic(cfg);
    std::filesystem::create_directories(out_dir);
    csv::write_file(out_dir / "prices.csv", records_csv(out.records));
    csv::write_file(out_dir / "config.json", config_to_json(out.config).dump(2) + "\n");
    std::string truth = "pair,lambda,mu,sigma,a,b,sd_eps,half_life\n";
    for (const auto& [id, p] : out.truth)
        truth += id + "," + csv::exact(p.lambda) + "," + csv::exact(p.mu) + "," + csv::exact(p.sigma) + "," +
                 csv::exact(p.a) + "," + csv::exact(p.b) + "," + csv::exact(p.sd_eps) + "," +
                 csv::exact(p.half_life()) + "\n";
    csv::write_file(out_dir / "synth_truth.csv", truth);
    out.config.base_dir = out_dir;
    return out;
}

}  // namespace pairs
