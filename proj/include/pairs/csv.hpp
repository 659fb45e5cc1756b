#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "pairs/error.hpp"

namespace pairs::csv {

inline constexpr std::string_view kMissing = "NA";

// Splits one delimited line. Double-quoted fields may contain the delimiter;
// a doubled quote inside a quoted field is a literal quote.
inline std::vector<std::string> split_line(std::string_view line, char delim = ',') {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

// Quotes a field when it contains the delimiter, a quote or a newline.
inline std::string quote(std::string_view field, char delim = ',') {
    if (field.find_first_of(std::string{delim} + "\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// Shortest representation that round-trips exactly; used for intermediate
// stage files so that re-reading reproduces the in-memory values bit for bit.
inline std::string exact(double value) {
    if (!std::isfinite(value)) return std::string{kMissing};
    return fmt::format("{}", value);
}

// Fixed six-decimal representation used by report files.
inline std::string fixed6(double value) {
    if (!std::isfinite(value)) return std::string{kMissing};
    auto text = fmt::format("{:.6f}", value);
    if (text == "-0.000000") text = "0.000000";
    return text;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

// Header-indexed view over a CSV file, for the stage files the CLI reads back.
class Table {
public:
    static Table read(const std::filesystem::path& path, char delim = ',') {
        Table table;
        table.path_ = path.string();
        auto lines = read_lines(path);
        bool have_header = false;
        for (auto& line : lines) {
            if (line.empty() || line.front() == '#') continue;
            auto fields = split_line(line, delim);
            if (!have_header) {
                table.header_ = std::move(fields);
                have_header = true;
            } else {
                table.rows_.push_back(std::move(fields));
            }
        }
        if (!have_header) throw DataError("'" + table.path_ + "' has no header row");
        return table;
    }

    std::size_t column(std::string_view name) const {
        for (std::size_t k = 0; k < header_.size(); ++k)
            if (header_[k] == name) return k;
        throw DataError("'" + path_ + "' lacks column '" + std::string(name) + "'");
    }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    const std::string& cell(std::size_t row, std::size_t col) const {
        if (col >= rows_[row].size())
            throw DataError("'" + path_ + "' row " + std::to_string(row + 1) + " is short");
        return rows_[row][col];
    }

    double number(std::size_t row, std::size_t col) const {
        const auto& text = cell(row, col);
        if (text == kMissing) return std::nan("");
        auto v = parse_double(text);
        if (!v)
            throw DataError("'" + path_ + "' row " + std::to_string(row + 1) +
                            ": not a number '" + text + "'");
        return *v;
    }

private:
    std::string path_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace pairs::csv
