#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace pairs {

using Date = std::chrono::year_month_day;

// Parses "YYYY-MM-DD". A trailing time component ("2018-01-02 00:00:00" or
// "2018-01-02T00:00:00") is accepted and ignored.
inline std::optional<Date> parse_date(std::string_view text) {
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (text.size() > 10 && text[10] != ' ' && text[10] != 'T') return std::nullopt;
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
        if (ec != std::errc{} || ptr != text.data() + pos + len) return std::nullopt;
        return value;
    };
    auto y = field(0, 4);
    auto m = field(5, 2);
    auto d = field(8, 2);
    if (!y || !m || !d) return std::nullopt;
    Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
              std::chrono::day{static_cast<unsigned>(*d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

inline std::string to_string(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

inline bool is_weekday(const Date& date) {
    std::chrono::weekday wd{std::chrono::sys_days{date}};
    return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

inline Date next_weekday(const Date& date) {
    auto day = std::chrono::sys_days{date} + std::chrono::days{1};
    while (!is_weekday(Date{day})) day += std::chrono::days{1};
    return Date{day};
}

}  // namespace pairs
