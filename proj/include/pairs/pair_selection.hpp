#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pairs/error.hpp"
#include "pairs/market_data.hpp"

namespace pairs {

struct PairCandidate {
    std::string sec_i;  // canonical order: sec_i < sec_j
    std::string sec_j;
    double msd = 0.0;
    std::optional<double> coint_stat;
    std::optional<double> p_value;
    bool retained = false;
    std::string reject_reason;
    std::optional<std::string> review_label;

    std::string id() const { return sec_i + "~" + sec_j; }
};

inline PairCandidate make_pair_candidate(std::string a, std::string b, double msd = 0.0) {
    if (a == b) throw DataError("a pair needs two distinct securities, got '" + a + "' twice");
    if (b < a) std::swap(a, b);
    PairCandidate pair;
    pair.sec_i = std::move(a);
    pair.sec_j = std::move(b);
    pair.msd = msd;
    return pair;
}

// Mean squared distance between two return series.
inline double msd(std::span<const double> returns_i, std::span<const double> returns_j) {
    if (returns_i.size() != returns_j.size())
        throw DataError("msd: series lengths differ (" + std::to_string(returns_i.size()) + " vs " +
                        std::to_string(returns_j.size()) + ")");
    if (returns_i.size() < 2) throw DataError("msd: need at least 2 observations");
    double sum = 0.0;
    for (std::size_t t = 0; t < returns_i.size(); ++t) {
        double d = returns_i[t] - returns_j[t];
        if (!std::isfinite(d)) throw DataError("msd: missing value at position " + std::to_string(t));
        sum += d * d;
    }
    return sum / static_cast<double>(returns_i.size());
}

namespace detail {

// Rows of the panel where every security has a finite return (drops the
// leading NaN row of a freshly built panel).
inline std::pair<std::size_t, std::size_t> complete_return_rows(const PricePanel& panel) {
    std::size_t first = 0;
    while (first < panel.num_dates()) {
        bool complete = true;
        for (std::size_t k = 0; k < panel.num_securities() && complete; ++k)
            complete = std::isfinite(panel.returns(first, k));
        if (complete) break;
        ++first;
    }
    return {first, panel.num_dates()};
}

inline bool msd_order(const PairCandidate& a, const PairCandidate& b) {
    return std::tie(a.msd, a.sec_i, a.sec_j) < std::tie(b.msd, b.sec_i, b.sec_j);
}

}  // namespace detail

// Every pair in the panel with its MSD, ascending; ties by (sec_i, sec_j).
inline std::vector<PairCandidate> rank_pairs(const PricePanel& train) {
    if (train.num_securities() < 2) throw DataError("pair selection needs at least 2 securities");
    auto [first, last] = detail::complete_return_rows(train);
    if (last - first < 2) throw DataError("pair selection needs at least 2 complete return rows");
    std::vector<PairCandidate> ranked;
    const std::size_t n = train.num_securities();
    ranked.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        auto ri = train.return_series(i).subspan(first, last - first);
        for (std::size_t j = i + 1; j < n; ++j) {
            auto rj = train.return_series(j).subspan(first, last - first);
            ranked.push_back(make_pair_candidate(train.securities[i], train.securities[j], msd(ri, rj)));
        }
    }
    std::sort(ranked.begin(), ranked.end(), detail::msd_order);
    return ranked;
}

// Greedy disjoint matching over a ranked list: take each pair whose members
// are both still unused.
inline std::vector<PairCandidate> greedy_disjoint(const std::vector<PairCandidate>& ranked,
                                                  std::size_t max_pairs) {
    std::vector<PairCandidate> selected;
    std::vector<std::string> used;
    auto is_used = [&](const std::string& id) {
        return std::find(used.begin(), used.end(), id) != used.end();
    };
    for (const auto& pair : ranked) {
        if (selected.size() >= max_pairs) break;
        if (is_used(pair.sec_i) || is_used(pair.sec_j)) continue;
        used.push_back(pair.sec_i);
        used.push_back(pair.sec_j);
        selected.push_back(pair);
    }
    return selected;
}

inline std::vector<PairCandidate> select_pairs(const PricePanel& train, std::size_t max_pairs) {
    return greedy_disjoint(rank_pairs(train), max_pairs);
}

}  // namespace pairs
