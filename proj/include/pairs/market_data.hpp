#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pairs/csv.hpp"
#include "pairs/date.hpp"
#include "pairs/error.hpp"
#include "pairs/grid.hpp"

namespace pairs {

// One security-day row of the vendor extract.
struct SecurityRecord {
    std::string infocode;
    std::string dscode;
    std::string isin;
    std::string ticker;
    std::string name;
    std::string region;
    std::string currency;
    Date marketdate{};
    std::optional<double> adjclose;
    std::optional<double> marketcap;
    std::string general_industry;
    std::string industry_group;

    // Securities are keyed by dscode throughout the panel and pair tables.
    const std::string& id() const noexcept { return dscode; }
};

// Maps record fields to header names. infocode, dscode, marketdate and
// adjclose must be present in the file; the remaining columns are read when
// present and left empty otherwise.
struct ColumnMapping {
    std::string infocode = "infocode";
    std::string dscode = "dscode";
    std::string isin = "isin";
    std::string ticker = "ticker";
    std::string name = "dssecname";
    std::string region = "region";
    std::string currency = "currency";
    std::string marketdate = "marketdate";
    std::string adjclose = "adjclose";
    std::string marketcap = "marketcap";
    std::string general_industry = "general_industry_desc";
    std::string industry_group = "industry_group_desc";
};

struct LoadOptions {
    char delimiter = ',';
    // Skip unparseable rows (recording them) instead of failing the load.
    bool lenient = false;
};

struct RowIssue {
    std::size_t row = 0;  // 1-based data row, header excluded
    std::string message;
};

struct LoadResult {
    std::vector<SecurityRecord> records;
    std::size_t rows_read = 0;
    std::size_t duplicates_dropped = 0;
    std::vector<RowIssue> skipped;
};

// Keeps the first occurrence of each (infocode, dscode, marketdate).
// Returns the number of rows removed.
inline std::size_t deduplicate(std::vector<SecurityRecord>& records) {
    std::unordered_set<std::string> seen;
    seen.reserve(records.size());
    std::vector<SecurityRecord> kept;
    kept.reserve(records.size());
    for (auto& rec : records) {
        std::string key = rec.infocode;
        key += '\x1f';
        key += rec.dscode;
        key += '\x1f';
        key += to_string(rec.marketdate);
        if (seen.insert(std::move(key)).second) kept.push_back(std::move(rec));
    }
    std::size_t removed = records.size() - kept.size();
    records = std::move(kept);
    return removed;
}

namespace detail {

inline bool is_missing_token(std::string_view text) {
    text = csv::trim(text);
    return text.empty() || text == "NA" || text == "NaN" || text == "nan" || text == "null";
}

}  // namespace detail

inline LoadResult load_records(const std::filesystem::path& path,
                               const ColumnMapping& mapping = {},
                               const LoadOptions& options = {}) {
    if (!std::filesystem::exists(path))
        throw DataError("data file '" + path.string() + "' does not exist");
    auto lines = csv::read_lines(path);

    LoadResult result;
    std::size_t first = 0;
    while (first < lines.size() && lines[first].empty()) ++first;
    if (first == lines.size()) throw DataError("'" + path.string() + "' has no header row");

    auto header = csv::split_line(lines[first], options.delimiter);
    for (auto& h : header) h = std::string(csv::trim(h));
    auto find = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
        if (required)
            throw DataError("'" + path.string() + "' lacks required column '" + name + "'");
        return std::nullopt;
    };
    const auto c_infocode = *find(mapping.infocode, true);
    const auto c_dscode = *find(mapping.dscode, true);
    const auto c_date = *find(mapping.marketdate, true);
    const auto c_close = *find(mapping.adjclose, true);
    const auto c_isin = find(mapping.isin, false);
    const auto c_ticker = find(mapping.ticker, false);
    const auto c_name = find(mapping.name, false);
    const auto c_region = find(mapping.region, false);
    const auto c_currency = find(mapping.currency, false);
    const auto c_mcap = find(mapping.marketcap, false);
    const auto c_gind = find(mapping.general_industry, false);
    const auto c_igrp = find(mapping.industry_group, false);

    for (std::size_t li = first + 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const std::size_t row = ++result.rows_read;
        auto fields = csv::split_line(lines[li], options.delimiter);
        auto text = [&](std::optional<std::size_t> col) -> std::string {
            if (!col || *col >= fields.size()) return {};
            return std::string(csv::trim(fields[*col]));
        };
        auto fail = [&](std::string message) {
            if (!options.lenient)
                throw DataError("'" + path.string() + "' row " + std::to_string(row) + ": " +
                                message);
            result.skipped.push_back({row, std::move(message)});
        };

        if (fields.size() < header.size()) {
            fail("expected " + std::to_string(header.size()) + " fields, found " +
                 std::to_string(fields.size()));
            continue;
        }

        SecurityRecord rec;
        rec.infocode = text(c_infocode);
        rec.dscode = text(c_dscode);
        if (rec.dscode.empty()) {
            fail("empty dscode");
            continue;
        }
        auto date = parse_date(text(c_date));
        if (!date) {
            fail("unparseable date '" + text(c_date) + "'");
            continue;
        }
        rec.marketdate = *date;

        auto close_text = text(c_close);
        if (!detail::is_missing_token(close_text)) {
            auto v = csv::parse_double(close_text);
            if (!v || !std::isfinite(*v) || *v <= 0.0) {
                fail("invalid adjclose '" + close_text + "'");
                continue;
            }
            rec.adjclose = *v;
        }
        auto mcap_text = text(c_mcap);
        if (!detail::is_missing_token(mcap_text)) {
            auto v = csv::parse_double(mcap_text);
            if (!v || !std::isfinite(*v)) {
                fail("invalid marketcap '" + mcap_text + "'");
                continue;
            }
            rec.marketcap = *v;
        }
        rec.isin = text(c_isin);
        rec.ticker = text(c_ticker);
        rec.name = text(c_name);
        rec.region = text(c_region);
        rec.currency = text(c_currency);
        rec.general_industry = text(c_gind);
        rec.industry_group = text(c_igrp);
        result.records.push_back(std::move(rec));
    }
    result.duplicates_dropped = deduplicate(result.records);
    return result;
}

struct UniverseFilter {
    double min_marketcap = 1e9;
    std::string region = "US";
    std::string currency = "USD";
    Date start_date = Date{std::chrono::year{2018}, std::chrono::January, std::chrono::day{1}};

    void validate() const {
        if (!(min_marketcap > 0.0)) throw ConfigError("min_marketcap must be positive");
    }
};

// A security is admitted or rejected as a whole, using its record on the
// first date >= start_date. Records dated before start_date are removed.
// An empty region/currency in the filter disables that predicate; an empty
// currency on the record (column absent from the file) is not held against it.
inline std::vector<SecurityRecord> filter_universe(const std::vector<SecurityRecord>& records,
                                                   const UniverseFilter& filter) {
    filter.validate();
    std::map<std::string, const SecurityRecord*> first_in_range;
    for (const auto& rec : records) {
        if (rec.marketdate < filter.start_date) continue;
        auto [it, inserted] = first_in_range.try_emplace(rec.id(), &rec);
        if (!inserted && rec.marketdate < it->second->marketdate) it->second = &rec;
    }
    std::unordered_set<std::string> admitted;
    for (const auto& [id, rec] : first_in_range) {
        bool ok = rec->marketcap.has_value() && *rec->marketcap > filter.min_marketcap;
        ok = ok && (filter.region.empty() || rec->region == filter.region);
        ok = ok && (filter.currency.empty() || rec->currency.empty() ||
                    rec->currency == filter.currency);
        if (ok) admitted.insert(id);
    }
    std::vector<SecurityRecord> out;
    for (const auto& rec : records)
        if (rec.marketdate >= filter.start_date && admitted.contains(rec.id())) out.push_back(rec);
    return out;
}

// Date-aligned closes and simple returns. Row 0 of `returns` is NaN for a
// panel built from records; sub-panels keep the parent's returns rows.
struct PricePanel {
    std::vector<Date> dates;
    std::vector<std::string> securities;
    Matrix closes;
    Matrix returns;
    Grid<unsigned char> filled;  // 1 where the close was forward-filled

    std::size_t num_dates() const noexcept { return dates.size(); }
    std::size_t num_securities() const noexcept { return securities.size(); }

    std::optional<std::size_t> find(std::string_view id) const {
        auto it = std::lower_bound(securities.begin(), securities.end(), id);
        if (it == securities.end() || *it != id) return std::nullopt;
        return static_cast<std::size_t>(it - securities.begin());
    }

    std::size_t index_of(std::string_view id) const {
        auto k = find(id);
        if (!k) throw DataError("security '" + std::string(id) + "' is not in the panel");
        return *k;
    }

    std::span<const double> close_series(std::size_t k) const { return closes.col(k); }
    std::span<const double> return_series(std::size_t k) const { return returns.col(k); }

    // Rows [first, last).
    PricePanel slice(std::size_t first, std::size_t last) const {
        PricePanel out;
        out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(first),
                         dates.begin() + static_cast<std::ptrdiff_t>(last));
        out.securities = securities;
        out.closes = closes.slice_rows(first, last);
        out.returns = returns.slice_rows(first, last);
        out.filled = filled.slice_rows(first, last);
        return out;
    }
};

// Simple returns from a close matrix; row 0 is NaN.
inline Matrix simple_returns(const Matrix& closes) {
    Matrix r(closes.rows(), closes.cols(), std::nan(""));
    for (std::size_t k = 0; k < closes.cols(); ++k)
        for (std::size_t t = 1; t < closes.rows(); ++t)
            r(t, k) = closes(t, k) / closes(t - 1, k) - 1.0;
    return r;
}

struct PanelOptions {
    double min_coverage = 0.95;
    std::size_t max_ffill_days = 5;
    // A date enters the panel only if at least this fraction of securities trade on it.
    double min_trading_fraction = 0.5;

    void validate() const {
        if (!(min_coverage >= 0.0 && min_coverage <= 1.0))
            throw ConfigError("min_coverage must lie in [0, 1]");
        if (!(min_trading_fraction > 0.0 && min_trading_fraction <= 1.0))
            throw ConfigError("min_trading_fraction must lie in (0, 1]");
    }
};

struct DroppedSecurity {
    std::string id;
    std::string reason;
};

// Securities must trade on the first panel date; later gaps of up to
// max_ffill_days consecutive panel dates are forward-filled.
inline PricePanel build_panel(const std::vector<SecurityRecord>& records,
                              const PanelOptions& options = {},
                              std::vector<DroppedSecurity>* dropped = nullptr) {
    options.validate();
    if (records.empty()) throw DataError("no records to build a panel from");

    std::map<std::string, std::map<Date, double>> series;
    for (const auto& rec : records) {
        auto& s = series[rec.id()];
        if (rec.adjclose) s.try_emplace(rec.marketdate, *rec.adjclose);
    }
    auto drop = [&](const std::string& id, std::string reason) {
        if (dropped) dropped->push_back({id, std::move(reason)});
    };

    std::map<Date, std::size_t> activity;
    std::size_t with_prices = 0;
    for (const auto& [id, s] : series) {
        if (s.empty()) continue;
        ++with_prices;
        for (const auto& [d, px] : s) ++activity[d];
    }
    std::vector<Date> dates;
    for (const auto& [d, count] : activity)
        if (static_cast<double>(count) >= options.min_trading_fraction * static_cast<double>(with_prices))
            dates.push_back(d);

    std::vector<std::string> kept_ids;
    std::vector<std::vector<double>> kept_closes;
    std::vector<std::vector<unsigned char>> kept_fills;
    for (const auto& [id, s] : series) {
        if (s.empty()) {
            drop(id, "no prices");
            continue;
        }
        std::vector<double> closes(dates.size());
        std::vector<unsigned char> fills(dates.size(), 0);
        std::size_t observed = 0;
        std::size_t gap = 0;
        std::size_t longest_gap = 0;
        bool leading_gap = false;
        for (std::size_t t = 0; t < dates.size(); ++t) {
            auto it = s.find(dates[t]);
            if (it != s.end()) {
                closes[t] = it->second;
                ++observed;
                gap = 0;
            } else if (t == 0) {
                leading_gap = true;
                break;
            } else {
                closes[t] = closes[t - 1];
                fills[t] = 1;
                longest_gap = std::max(longest_gap, ++gap);
            }
        }
        if (leading_gap) {
            drop(id, "no price on first panel date " + to_string(dates.front()));
            continue;
        }
        double coverage = dates.empty() ? 0.0
                                        : static_cast<double>(observed) / static_cast<double>(dates.size());
        if (coverage < options.min_coverage) {
            drop(id, fmt::format("coverage {:.4f} below min_coverage {:.4f}", coverage,
                                 options.min_coverage));
            continue;
        }
        if (longest_gap > options.max_ffill_days) {
            drop(id, fmt::format("gap of {} days exceeds forward-fill limit {}", longest_gap,
                                 options.max_ffill_days));
            continue;
        }
        kept_ids.push_back(id);
        kept_closes.push_back(std::move(closes));
        kept_fills.push_back(std::move(fills));
    }
    if (kept_ids.empty())
        throw DataError(fmt::format(
            "every security was dropped while building the panel (min_coverage {}, "
            "forward-fill limit {} days)",
            options.min_coverage, options.max_ffill_days));

    PricePanel panel;
    panel.dates = std::move(dates);
    panel.securities = std::move(kept_ids);
    panel.closes = Matrix(panel.dates.size(), panel.securities.size());
    panel.filled = Grid<unsigned char>(panel.dates.size(), panel.securities.size());
    for (std::size_t k = 0; k < panel.securities.size(); ++k)
        for (std::size_t t = 0; t < panel.dates.size(); ++t) {
            panel.closes(t, k) = kept_closes[k][t];
            panel.filled(t, k) = kept_fills[k][t];
        }
    panel.returns = simple_returns(panel.closes);
    return panel;
}

struct DateSplit {
    Date train_start{};
    Date train_end{};
    Date test_start{};
    Date test_end{};

    void validate() const {
        if (train_start > train_end) throw ConfigError("train_start is after train_end");
        if (test_start > test_end) throw ConfigError("test_start is after test_end");
        if (!(train_end < test_start)) throw ConfigError("train_end must precede test_start");
    }
};

// Partitions rows by date. Both halves keep the parent's returns, so the
// first test row carries the return from the last train close.
inline std::pair<PricePanel, PricePanel> split_panel(const PricePanel& panel, const DateSplit& split) {
    split.validate();
    auto range = [&](Date lo, Date hi) {
        auto first = std::lower_bound(panel.dates.begin(), panel.dates.end(), lo);
        auto last = std::upper_bound(panel.dates.begin(), panel.dates.end(), hi);
        return std::pair<std::size_t, std::size_t>(
            static_cast<std::size_t>(first - panel.dates.begin()),
            static_cast<std::size_t>(std::max(first, last) - panel.dates.begin()));
    };
    auto [tr0, tr1] = range(split.train_start, split.train_end);
    auto [te0, te1] = range(split.test_start, split.test_end);
    if (tr0 == tr1)
        throw DataError("training range " + to_string(split.train_start) + ".." +
                        to_string(split.train_end) + " contains no panel dates");
    if (te0 == te1)
        throw DataError("test range " + to_string(split.test_start) + ".." +
                        to_string(split.test_end) + " contains no panel dates");
    return {panel.slice(tr0, tr1), panel.slice(te0, te1)};
}

// Aligned close matrix as a dated CSV: date,<id>,<id>,...
inline std::string panel_to_csv(const PricePanel& panel) {
    std::string out = "date";
    for (const auto& id : panel.securities) out += "," + id;
    out += '\n';
    for (std::size_t t = 0; t < panel.num_dates(); ++t) {
        out += to_string(panel.dates[t]);
        for (std::size_t k = 0; k < panel.num_securities(); ++k)
            out += "," + csv::exact(panel.closes(t, k));
        out += '\n';
    }
    return out;
}

// Reads a panel_to_csv dump. Returns are recomputed; fill flags are not stored.
inline PricePanel read_panel_csv(const std::filesystem::path& path) {
    auto table = csv::Table::read(path);
    const auto& header = table.header();
    if (header.empty() || header.front() != "date")
        throw DataError("'" + path.string() + "' is not a panel dump (first column must be date)");
    PricePanel panel;
    panel.securities.assign(header.begin() + 1, header.end());
    if (!std::is_sorted(panel.securities.begin(), panel.securities.end()))
        throw DataError("'" + path.string() + "' security columns are not sorted");
    const std::size_t rows = table.rows().size();
    panel.closes = Matrix(rows, panel.securities.size());
    panel.filled = Grid<unsigned char>(rows, panel.securities.size());
    for (std::size_t t = 0; t < rows; ++t) {
        auto d = parse_date(table.cell(t, 0));
        if (!d) throw DataError("'" + path.string() + "' row " + std::to_string(t + 1) + ": bad date");
        if (!panel.dates.empty() && !(panel.dates.back() < *d))
            throw DataError("'" + path.string() + "' dates are not strictly increasing");
        panel.dates.push_back(*d);
        for (std::size_t k = 0; k < panel.securities.size(); ++k)
            panel.closes(t, k) = table.number(t, k + 1);
    }
    panel.returns = simple_returns(panel.closes);
    return panel;
}

}  // namespace pairs
