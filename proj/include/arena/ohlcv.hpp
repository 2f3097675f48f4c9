#pragma once

// Daily OHLCV bars and the CSV loader (Yahoo/Baostock style daily records).

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "arena/common.hpp"

namespace arena {

struct OhlcvBar {
    std::string date;  // ISO YYYY-MM-DD; lexicographic order == chronological
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;

    void validate(std::size_t line_no) const {
        if (open <= 0.0 || high <= 0.0 || low <= 0.0 || close <= 0.0)
            throw validation_error("line " + std::to_string(line_no) + ": non-positive price");
        if (low > std::min(open, close) || high < std::max(open, close) || low > high)
            throw validation_error("line " + std::to_string(line_no) + ": OHLC ordering violated");
        if (volume < 0.0)
            throw validation_error("line " + std::to_string(line_no) + ": negative volume");
    }
};

// Header-name mapping for nonstandard CSV column labels.
struct CsvColumnMap {
    std::string date = "date";
    std::string open = "open";
    std::string high = "high";
    std::string low = "low";
    std::string close = "close";
    std::string volume = "volume";
};

struct CsvLoadResult {
    std::vector<OhlcvBar> bars;
    bool sorted_on_load = false;  // true when input dates were out of order
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
    return out;
}

inline double parse_num(const std::string& s, std::size_t line_no, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw validation_error("");
        return v;
    } catch (...) {
        throw validation_error("line " + std::to_string(line_no) + ": cannot parse " + what + " '" + s + "'");
    }
}

} // namespace detail

// Parses a header-bearing OHLCV CSV; rows come back sorted ascending by date
// (sorted_on_load flags inputs that were shuffled). Malformed rows and
// invariant violations throw with the offending line number.
inline CsvLoadResult load_ohlcv_csv(const std::string& path, const CsvColumnMap& columns = {}) {
    std::ifstream in(path);
    if (!in) throw lookup_error("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw validation_error(path + ": empty file");
    const auto header = detail::split_csv(line);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index[detail::lower(header[i])] = i;

    auto col = [&](const std::string& name) -> std::size_t {
        auto it = index.find(detail::lower(name));
        if (it == index.end()) throw validation_error(path + ": missing column '" + name + "'");
        return it->second;
    };
    const std::size_t ci_date = col(columns.date), ci_open = col(columns.open), ci_high = col(columns.high),
                      ci_low = col(columns.low), ci_close = col(columns.close), ci_vol = col(columns.volume);

    CsvLoadResult result;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto toks = detail::split_csv(line);
        const std::size_t need = std::max({ci_date, ci_open, ci_high, ci_low, ci_close, ci_vol}) + 1;
        if (toks.size() < need)
            throw validation_error("line " + std::to_string(line_no) + ": expected >= " +
                                   std::to_string(need) + " columns, got " + std::to_string(toks.size()));
        OhlcvBar bar;
        bar.date = toks[ci_date];
        bar.open = detail::parse_num(toks[ci_open], line_no, "open");
        bar.high = detail::parse_num(toks[ci_high], line_no, "high");
        bar.low = detail::parse_num(toks[ci_low], line_no, "low");
        bar.close = detail::parse_num(toks[ci_close], line_no, "close");
        bar.volume = detail::parse_num(toks[ci_vol], line_no, "volume");
        bar.validate(line_no);
        result.bars.push_back(std::move(bar));
    }

    if (!std::is_sorted(result.bars.begin(), result.bars.end(),
                        [](const OhlcvBar& a, const OhlcvBar& b) { return a.date < b.date; })) {
        std::stable_sort(result.bars.begin(), result.bars.end(),
                         [](const OhlcvBar& a, const OhlcvBar& b) { return a.date < b.date; });
        result.sorted_on_load = true;
    }
    return result;
}

inline std::vector<double> closes(const std::vector<OhlcvBar>& bars) {
    std::vector<double> out;
    out.reserve(bars.size());
    for (const auto& b : bars) out.push_back(b.close);
    return out;
}

} // namespace arena
