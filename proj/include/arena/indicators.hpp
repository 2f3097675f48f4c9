#pragma once

// Shared indicator math for the rule-based baselines: simple and exponential
// moving averages, MACD, and rolling mean/std windows.

#include <cmath>
#include <cstddef>
#include <vector>

#include "arena/common.hpp"

namespace arena {

// Arithmetic mean over each trailing window; output length = n - window + 1.
inline std::vector<double> sma(const std::vector<double>& prices, int window) {
    if (window < 1) throw validation_error("sma: window must be >= 1");
    if (prices.size() < static_cast<std::size_t>(window))
        throw validation_error("sma: series shorter than window");
    std::vector<double> out;
    out.reserve(prices.size() - window + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        sum += prices[i];
        if (i + 1 >= static_cast<std::size_t>(window)) {
            out.push_back(sum / window);
            sum -= prices[i + 1 - window];
        }
    }
    return out;
}

// ema[0] = prices[0]; ema[i] = ema[i-1] + alpha * (prices[i] - ema[i-1]),
// alpha = 2 / (span + 1). The increment form keeps a constant series an exact
// fixed point in floating point.
inline std::vector<double> ema(const std::vector<double>& prices, int span) {
    if (span < 1) throw validation_error("ema: span must be >= 1");
    if (prices.empty()) throw validation_error("ema: empty series");
    const double alpha = 2.0 / (span + 1.0);
    std::vector<double> out;
    out.reserve(prices.size());
    double value = prices[0];
    out.push_back(value);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        value += alpha * (prices[i] - value);
        out.push_back(value);
    }
    return out;
}

struct MacdResult {
    std::vector<double> macd_line;
    std::vector<double> signal_line;
    std::vector<double> histogram;
};

inline MacdResult macd(const std::vector<double>& prices, int fast_span = 12, int slow_span = 26,
                       int signal_span = 9) {
    if (prices.size() < static_cast<std::size_t>(slow_span))
        throw validation_error("macd: need at least slow-span prices");
    const auto fast = ema(prices, fast_span);
    const auto slow = ema(prices, slow_span);
    MacdResult r;
    r.macd_line.resize(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) r.macd_line[i] = fast[i] - slow[i];
    r.signal_line = ema(r.macd_line, signal_span);
    r.histogram.resize(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) r.histogram[i] = r.macd_line[i] - r.signal_line[i];
    return r;
}

struct RollingStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n-1); 0 when n < 2
};

// Mean and sample standard deviation over the last `window` points.
inline RollingStats rolling_stats(const std::vector<double>& prices, int window) {
    if (window < 1) throw validation_error("rolling_stats: window must be >= 1");
    if (prices.size() < static_cast<std::size_t>(window))
        throw validation_error("rolling_stats: series shorter than window");
    const std::size_t begin = prices.size() - window;
    double sum = 0.0;
    for (std::size_t i = begin; i < prices.size(); ++i) sum += prices[i];
    RollingStats st;
    st.mean = sum / window;
    if (window > 1) {
        double sq = 0.0;
        for (std::size_t i = begin; i < prices.size(); ++i) {
            const double d = prices[i] - st.mean;
            sq += d * d;
        }
        st.stddev = std::sqrt(sq / (window - 1));
    }
    return st;
}

} // namespace arena
