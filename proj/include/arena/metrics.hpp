#pragma once

// Backtest metrics: total return, win rate, Sharpe ratio (zero risk-free
// rate, sample std), mean and std of daily returns.

#include <cmath>
#include <string>
#include <vector>

#include "arena/common.hpp"

namespace arena {

inline double total_return(double c0, double c1) {
    if (c0 <= 0.0) throw validation_error("total_return: initial capital must be > 0");
    return (c1 - c0) / c0;
}

// Fraction of strictly profitable days; zero-return days count as non-wins.
inline double win_rate(const std::vector<double>& daily_returns) {
    if (daily_returns.empty()) throw validation_error("win_rate: empty return series");
    std::size_t wins = 0;
    for (double r : daily_returns)
        if (r > 0.0) ++wins;
    return static_cast<double>(wins) / static_cast<double>(daily_returns.size());
}

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n-1)
};

inline MeanStd mean_std(const std::vector<double>& daily_returns) {
    if (daily_returns.size() < 2) throw validation_error("mean_std: need at least 2 returns");
    MeanStd ms;
    for (double r : daily_returns) ms.mean += r;
    ms.mean /= static_cast<double>(daily_returns.size());
    double sq = 0.0;
    for (double r : daily_returns) {
        const double d = r - ms.mean;
        sq += d * d;
    }
    ms.stddev = std::sqrt(sq / static_cast<double>(daily_returns.size() - 1));
    return ms;
}

struct SharpeResult {
    double value = 0.0;
    bool defined = false;  // false when return variance is zero
};

// mean / sample std with R_f = 0; undefined (not NaN) on zero variance.
inline SharpeResult sharpe(const std::vector<double>& daily_returns) {
    if (daily_returns.size() < 2) throw validation_error("sharpe: need at least 2 returns");
    const MeanStd ms = mean_std(daily_returns);
    if (ms.stddev == 0.0) return {0.0, false};
    return {ms.mean / ms.stddev, true};
}

struct EquityCurve {
    std::vector<int> dates;      // trading-day indices
    std::vector<double> wealth;  // wealth[0] = initial capital

    std::vector<double> daily_returns() const {
        std::vector<double> out;
        for (std::size_t i = 1; i < wealth.size(); ++i)
            out.push_back(wealth[i - 1] != 0.0 ? (wealth[i] - wealth[i - 1]) / wealth[i - 1] : 0.0);
        return out;
    }
};

struct BacktestReport {
    std::string label;       // agent / modality name
    int window = 0;          // trailing-close window used
    double tr_pct = 0.0;     // total return, percent
    double mean_pct = 0.0;   // mean daily return, percent
    double std_pct = 0.0;    // std of daily returns, percent
    double wr_pct = 0.0;     // win rate, percent
    double sr = 0.0;
    bool sr_defined = false;
    EquityCurve curve;
    std::string config_echo;  // run parameters this report was produced under
};

inline BacktestReport summarize_curve(const EquityCurve& curve, double initial_capital) {
    BacktestReport rep;
    rep.curve = curve;
    rep.tr_pct = total_return(initial_capital, curve.wealth.empty() ? initial_capital : curve.wealth.back()) * 100.0;
    const auto rets = curve.daily_returns();
    if (rets.size() >= 2) {
        const MeanStd ms = mean_std(rets);
        rep.mean_pct = ms.mean * 100.0;
        rep.std_pct = ms.stddev * 100.0;
        const SharpeResult sr = sharpe(rets);
        rep.sr = sr.value;
        rep.sr_defined = sr.defined;
    }
    if (!rets.empty()) rep.wr_pct = win_rate(rets) * 100.0;
    return rep;
}

} // namespace arena
