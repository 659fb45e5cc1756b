// Command-line front end: `run` executes the whole pipeline from a config
// file; the stage subcommands run one step on the previous step's files.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pairs/pairs.hpp"

namespace fs = std::filesystem;
using namespace pairs;

namespace {

struct Overrides {
    std::string config;
    std::vector<std::string> data;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> strategy;
    std::optional<std::size_t> max_pairs;
    std::optional<double> alpha;
    std::optional<double> upper_pct, lower_pct, exit_pct;
    std::optional<std::size_t> pct_window, stats_window;
    std::optional<std::string> cointegrate_on;

    void attach(CLI::App* cmd) {
        cmd->add_option("-c,--config", config, "JSON config file");
        cmd->add_option("--data", data, "price file(s), replacing data_paths");
        cmd->add_option("--seed", seed, "seed recorded in the manifest");
        cmd->add_option("-o,--out", out, "output directory");
        cmd->add_option("--strategy", strategy, "baseline, ou or both");
        cmd->add_option("--max-pairs", max_pairs, "number of pairs to select");
        cmd->add_option("--alpha", alpha, "cointegration significance level");
        cmd->add_option("--cointegrate-on", cointegrate_on, "returns or prices");
        cmd->add_option("--upper-pct", upper_pct, "short entry percentile");
        cmd->add_option("--lower-pct", lower_pct, "long entry percentile");
        cmd->add_option("--exit-pct", exit_pct, "exit percentile");
        cmd->add_option("--pct-window", pct_window, "rolling percentile window");
        cmd->add_option("--stats-window", stats_window, "baseline rolling mean/sd window");
    }

    RunConfig resolve() const {
        RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
        if (!data.empty()) {
            cfg.data_paths = data;
            cfg.base_dir = fs::current_path();
        }
        if (seed) cfg.seed = *seed;
        if (out) cfg.out_dir = *out;
        if (strategy) cfg.strategy = parse_strategy_set(*strategy);
        if (max_pairs) cfg.max_pairs = *max_pairs;
        if (alpha) cfg.alpha = *alpha;
        if (cointegrate_on) {
            if (*cointegrate_on == "returns") cfg.cointegrate_on = CointegrationBasis::Returns;
            else if (*cointegrate_on == "prices") cfg.cointegrate_on = CointegrationBasis::Prices;
            else throw ConfigError("--cointegrate-on must be returns or prices");
        }
        auto& th = cfg.backtest.thresholds;
        if (upper_pct) th.upper_pct = *upper_pct;
        if (lower_pct) th.lower_pct = *lower_pct;
        if (exit_pct) th.exit_pct = *exit_pct;
        if (pct_window) th.pct_window = *pct_window;
        if (stats_window) th.stats_window = *stats_window;
        cfg.validate();
        return cfg;
    }
};

// Stage inputs default to the files a previous stage wrote into --out.
fs::path input_or(const std::string& given, const RunConfig& cfg, std::string_view default_name) {
    return given.empty() ? cfg.out_dir / default_name : fs::path(given);
}

int exit_code(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 1;
    if (dynamic_cast<const DataError*>(&e)) return 2;
    return 3;
}

std::string_view error_kind(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "config error";
    if (dynamic_cast<const DataError*>(&e)) return "data error";
    return "pipeline error";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distance-selected, cointegration-validated pairs trading backtester"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Overrides ov;
    std::string panel_file, pairs_file, params_file, backtest_dir;
    SynthConfig synth_cfg;
    std::string synth_out = "synth";
    std::optional<std::string> synth_start;

    auto* run = app.add_subcommand("run", "ingest -> select -> validate -> calibrate -> backtest -> report");
    auto* ingest_cmd = app.add_subcommand("ingest", "load, filter and align prices into panel.csv");
    auto* select_cmd = app.add_subcommand("select-pairs", "rank pairs by MSD and pick disjoint pairs");
    auto* validate_cmd = app.add_subcommand("validate-pairs", "Engle-Granger test of selected pairs");
    auto* calibrate_cmd = app.add_subcommand("calibrate", "fit OU parameters to retained pairs");
    auto* backtest_cmd = app.add_subcommand("backtest", "simulate the strategies over the test window");
    auto* report_cmd = app.add_subcommand("report", "metrics and plot data from backtest files");
    auto* synth = app.add_subcommand("synth", "write a synthetic price file with cointegrated pairs");

    for (auto* cmd : {run, ingest_cmd, select_cmd, validate_cmd, calibrate_cmd, backtest_cmd, report_cmd})
        ov.attach(cmd);
    for (auto* cmd : {select_cmd, validate_cmd, calibrate_cmd, backtest_cmd})
        cmd->add_option("--panel", panel_file, "panel CSV (default <out>/panel.csv)");
    validate_cmd->add_option("--pairs", pairs_file, "pair CSV (default <out>/pairs_selected.csv)");
    calibrate_cmd->add_option("--pairs", pairs_file, "pair CSV (default <out>/pairs_validated.csv)");
    backtest_cmd->add_option("--pairs", pairs_file, "pair CSV (default <out>/pairs_validated.csv)");
    backtest_cmd->add_option("--params", params_file, "OU parameter CSV (default <out>/ou_params.csv)");
    report_cmd->add_option("--backtest-dir", backtest_dir, "directory with backtest files (default <out>)");

    synth->add_option("-o,--out", synth_out, "output directory")->capture_default_str();
    synth->add_option("--n-pairs", synth_cfg.n_pairs, "cointegrated pairs")->capture_default_str();
    synth->add_option("--n-days", synth_cfg.n_days, "trading days")->capture_default_str();
    synth->add_option("--decoys", synth_cfg.n_decoys, "independent random walks")->capture_default_str();
    synth->add_option("--seed", synth_cfg.seed, "master seed")->capture_default_str();
    synth->add_option("--lambda-min", synth_cfg.lambda_min_ann, "min spread mean-reversion speed, per year")
        ->capture_default_str();
    synth->add_option("--lambda-max", synth_cfg.lambda_max_ann, "max spread mean-reversion speed, per year")
        ->capture_default_str();
    synth->add_option("--spread-sd-min", synth_cfg.spread_sd_min, "min stationary spread sd")->capture_default_str();
    synth->add_option("--spread-sd-max", synth_cfg.spread_sd_max, "max stationary spread sd")->capture_default_str();
    synth->add_option("--mu-max", synth_cfg.mu_abs_max, "max |long-run spread mean|")->capture_default_str();
    synth->add_option("--daily-vol", synth_cfg.daily_vol, "daily log-price volatility")->capture_default_str();
    synth->add_option("--train-fraction", synth_cfg.train_fraction, "share of days in the training window")
        ->capture_default_str();
    synth->add_option("--start", synth_start, "first date, YYYY-MM-DD");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    std::string stage = "config";
    try {
        if (synth->parsed()) {
            if (synth_start) {
                auto d = parse_date(*synth_start);
                if (!d) throw ConfigError("--start: invalid date '" + *synth_start + "'");
                synth_cfg.start = *d;
            }
            stage = "synth";
            auto out = write_synthetic(synth_cfg, synth_out);
            fmt::print("synth: {} securities x {} days -> {}\n", out.records.size() / synth_cfg.n_days,
                       synth_cfg.n_days, synth_out);
            return 0;
        }

        const RunConfig cfg = ov.resolve();
        fs::create_directories(cfg.out_dir);

        if (run->parsed()) {
            auto summary = run_pipeline(cfg, &stage);
            for (const auto& s : summary.strategies) {
                const auto& m = s.metrics;
                fmt::print("{:<9} pairs={} days={} ER={} vol={} sharpe={} mdd={}\n", to_string(s.backtest.strategy),
                           s.backtest.pair_ids.size(), s.backtest.dates.size(), csv::fixed6(m.expected_return_ann),
                           csv::fixed6(m.volatility_ann), m.sharpe ? csv::fixed6(*m.sharpe) : "undefined",
                           csv::fixed6(m.max_drawdown));
            }
            fmt::print("outputs in {}\n", cfg.out_dir.string());
            return 0;
        }

        if (ingest_cmd->parsed()) {
            stage = "ingest";
            auto res = ingest(cfg);
            csv::write_file(cfg.out_dir / files::kPanel, panel_to_csv(res.panel));
            fmt::print("ingest: {} rows, {} dates x {} securities, {} dropped\n", res.rows_read,
                       res.panel.num_dates(), res.panel.num_securities(), res.dropped.size());
            return 0;
        }

        if (report_cmd->parsed()) {
            stage = "report";
            const fs::path dir = backtest_dir.empty() ? cfg.out_dir : fs::path(backtest_dir);
            for (auto strategy : strategies_in(cfg.strategy)) {
                auto result = read_backtest_files(dir, strategy);
                auto m = report_stage(cfg, result, cfg.out_dir);
                fmt::print("report {}: ER={} sharpe={}\n", to_string(strategy), csv::fixed6(m.expected_return_ann),
                           m.sharpe ? csv::fixed6(*m.sharpe) : "undefined");
            }
            return 0;
        }

        stage = "ingest";
        const auto panel = read_panel_csv(input_or(panel_file, cfg, files::kPanel));
        stage = "select";
        const auto sel = select_stage(cfg, panel);

        if (select_cmd->parsed()) {
            csv::write_file(cfg.out_dir / files::kRankedPairs, ranked_pairs_csv(sel.ranked));
            csv::write_file(cfg.out_dir / files::kSelectedPairs, pairs_csv(sel.selected));
            fmt::print("select-pairs: {} ranked, {} selected\n", sel.ranked.size(), sel.selected.size());
            return 0;
        }
        if (validate_cmd->parsed()) {
            stage = "validate";
            auto selected = read_pairs_csv(input_or(pairs_file, cfg, files::kSelectedPairs));
            auto validated = validate_pairs(selected, sel.train, cfg.alpha, cfg.cointegrate_on);
            csv::write_file(cfg.out_dir / files::kValidatedPairs, pairs_csv(validated));
            auto retained = retained_only(validated).size();
            fmt::print("validate-pairs: {} of {} retained\n", retained, validated.size());
            if (retained == 0) throw PipelineError("validate", "no retained pairs");
            return 0;
        }

        stage = "validate";
        const auto retained = retained_only(read_pairs_csv(input_or(pairs_file, cfg, files::kValidatedPairs)));
        if (retained.empty()) throw PipelineError("validate", "no retained pairs");

        if (calibrate_cmd->parsed()) {
            stage = "calibrate";
            auto rows = calibrate_pairs(retained, sel.train, cfg.delta);
            csv::write_file(cfg.out_dir / files::kOuParams, calibration_csv(rows));
            fmt::print("calibrate: {} of {} pairs calibrated\n", params_by_pair(rows).size(), rows.size());
            return 0;
        }
        if (backtest_cmd->parsed()) {
            stage = "calibrate";
            std::map<std::string, OuParams> params;
            if (cfg.strategy != StrategySet::Baseline)
                params = read_calibration_csv(input_or(params_file, cfg, files::kOuParams));
            stage = "backtest";
            for (auto strategy : strategies_in(cfg.strategy)) {
                auto result = run_backtest(sel.test, retained, strategy, cfg.backtest, params);
                write_backtest_files(result, cfg.out_dir);
                fmt::print("backtest {}: {} pairs x {} days\n", to_string(strategy), result.pair_ids.size(),
                           result.dates.size());
            }
            return 0;
        }
        return 0;
    } catch (const std::exception& e) {
        std::string where = stage, what = e.what();
        if (auto* pe = dynamic_cast<const PipelineError*>(&e)) {
            where = pe->stage();
            what = pe->reason();
        }
        fmt::print(stderr, "{} [{}]: {}\n", error_kind(e), where, what);
        return exit_code(e);
    }
}
