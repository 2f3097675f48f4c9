#pragma once

// Deterministic rule-based baselines: buy & hold, SMA crossover, zone mean
// reversion and MACD. All pure functions of (observation, params, position
// state); sizing is all-in/all-out at the last close.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "arena/indicators.hpp"
#include "arena/market.hpp"
#include "arena/observation.hpp"

namespace arena {

enum class SignalDirection { long_entry, exit, hold };

struct Signal {
    SignalDirection direction = SignalDirection::hold;
    double strength = 0.0;  // in [0,1]; meaningful only when direction != hold
};

enum class StrategyKind { buy_hold, sma, zmr, macd };

inline const char* to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::buy_hold: return "buy_hold";
        case StrategyKind::sma: return "sma";
        case StrategyKind::zmr: return "zmr";
        default: return "macd";
    }
}

inline StrategyKind strategy_kind_from_string(std::string_view s) {
    if (s == "buy_hold") return StrategyKind::buy_hold;
    if (s == "sma") return StrategyKind::sma;
    if (s == "zmr") return StrategyKind::zmr;
    if (s == "macd") return StrategyKind::macd;
    throw validation_error("unknown strategy kind: " + std::string(s));
}

struct StrategyParams {
    int sma_short = 5;
    int sma_long = 20;
    int zmr_window = 10;
    double zmr_k = 2.0;
    int zmr_hold = 5;
    int macd_fast = 12;
    int macd_slow = 26;
    int macd_signal = 9;

    void validate() const {
        if (sma_short < 1 || sma_long < 1 || zmr_window < 1 || zmr_hold < 1 || macd_fast < 1 ||
            macd_slow < 1 || macd_signal < 1)
            throw validation_error("strategy windows must be >= 1");
        if (sma_short >= sma_long) throw validation_error("sma_short must be < sma_long");
    }
};

// Zone mean reversion over the trailing zmr_window closes.
// position_age < 0 means flat; otherwise days since entry.
inline Signal zmr_signal(const std::vector<double>& prices, const StrategyParams& params,
                         int position_age) {
    if (prices.size() < static_cast<std::size_t>(params.zmr_window))
        throw validation_error("zmr_signal: series shorter than zmr_window");
    const RollingStats st = rolling_stats(prices, params.zmr_window);
    const double last = prices.back();
    const double band = params.zmr_k * st.stddev;
    const bool holding = position_age >= 0;

    if (holding && position_age >= params.zmr_hold) return {SignalDirection::exit, 1.0};
    if (st.stddev == 0.0 && params.zmr_k > 0.0) return {SignalDirection::hold, 0.0};

    if (holding) {
        if (last > st.mean + band || last >= st.mean) {
            const double s = band > 0.0 ? std::min(1.0, (last - st.mean) / band) : 1.0;
            return {SignalDirection::exit, std::max(0.0, s)};
        }
        return {SignalDirection::hold, 0.0};
    }
    if (last < st.mean - band) {
        const double s = band > 0.0 ? std::min(1.0, (st.mean - band - last) / band) : 1.0;
        return {SignalDirection::long_entry, s};
    }
    return {SignalDirection::hold, 0.0};
}

namespace detail {

// Crossover of a fast line over a slow line at the final point.
inline Signal crossover_at_end(const std::vector<double>& fast, const std::vector<double>& slow,
                               bool holding) {
    const std::size_t n = std::min(fast.size(), slow.size());
    if (n < 2) return {SignalDirection::hold, 0.0};
    const double f1 = fast[fast.size() - 1], f0 = fast[fast.size() - 2];
    const double s1 = slow[slow.size() - 1], s0 = slow[slow.size() - 2];
    if (!holding && f0 <= s0 && f1 > s1) return {SignalDirection::long_entry, 1.0};
    if (holding && f0 >= s0 && f1 < s1) return {SignalDirection::exit, 1.0};
    return {SignalDirection::hold, 0.0};
}

inline Signal sma_cross_signal(const std::vector<double>& prices, const StrategyParams& p,
                               bool holding) {
    if (prices.size() < static_cast<std::size_t>(p.sma_long) + 1) return {SignalDirection::hold, 0.0};
    return crossover_at_end(sma(prices, p.sma_short), sma(prices, p.sma_long), holding);
}

inline Signal macd_cross_signal(const std::vector<double>& prices, const StrategyParams& p,
                                bool holding) {
    if (prices.size() < static_cast<std::size_t>(p.macd_slow) + 1) return {SignalDirection::hold, 0.0};
    const MacdResult m = macd(prices, p.macd_fast, p.macd_slow, p.macd_signal);
    return crossover_at_end(m.macd_line, m.signal_line, holding);
}

} // namespace detail

// Days since entry per held ticker; the stateful part that keeps the decide
// function itself pure.
struct RulePositionState {
    std::map<std::string, int> age_days;

    int age(const std::string& ticker) const {
        auto it = age_days.find(ticker);
        return it == age_days.end() ? -1 : it->second;
    }
};

// One order per call. buy_hold spreads cash equally across tickers on day 0
// (one ticker per call, so one per iteration); the indicator strategies sell
// the first exit signal, otherwise buy the first entry signal, all-in at the
// last close. Never emits an order that execute_order would reject given the
// account snapshot used to size it.
inline Order rule_agent_decide(StrategyKind kind, const StrategyParams& params,
                               const Observation& obs, const AgentAccount& account,
                               const RulePositionState& pos, bool allow_full_liquidation = false) {
    Order order;
    order.agent_id = account.agent_id;
    order.date = obs.date;

    auto make_buy = [&](const TickerView& t, double cash_alloc) -> bool {
        if (t.price_curr <= 0.0) return false;
        const long long qty = static_cast<long long>(std::floor(cash_alloc / t.price_curr));
        if (qty < 1) return false;
        order.op = OrderOp::buy;
        order.ticker = t.ticker;
        order.qty = qty;
        order.price_deal = t.price_curr;
        return true;
    };
    auto make_sell = [&](const std::string& ticker, double last_price) -> bool {
        const Holding* h = account.find_holding(ticker);
        if (h == nullptr || h->qty <= 0) return false;
        const long long qty = allow_full_liquidation ? h->qty : h->qty - 1;
        if (qty < 1) return false;
        order.op = OrderOp::sell;
        order.ticker = ticker;
        order.qty = qty;
        order.price_deal = last_price;
        return true;
    };

    if (kind == StrategyKind::buy_hold) {
        if (obs.date != 0) return order;
        long long unheld = 0;
        for (const auto& t : obs.tickers)
            if (account.find_holding(t.ticker) == nullptr) ++unheld;
        if (unheld == 0) return order;
        for (const auto& t : obs.tickers) {
            if (account.find_holding(t.ticker) != nullptr) continue;
            if (make_buy(t, account.cash / static_cast<double>(unheld))) return order;
        }
        return order;
    }

    auto signal_for = [&](const TickerView& t, bool holding) -> Signal {
        switch (kind) {
            case StrategyKind::sma: return detail::sma_cross_signal(t.closes, params, holding);
            case StrategyKind::zmr:
                if (t.closes.size() < static_cast<std::size_t>(params.zmr_window))
                    return {SignalDirection::hold, 0.0};
                return zmr_signal(t.closes, params, holding ? pos.age(t.ticker) : -1);
            default: return detail::macd_cross_signal(t.closes, params, holding);
        }
    };

    // Exits first: free the cash before considering entries.
    for (const auto& t : obs.tickers) {
        const bool holding = account.find_holding(t.ticker) != nullptr;
        if (!holding) continue;
        if (signal_for(t, true).direction == SignalDirection::exit &&
            make_sell(t.ticker, t.price_curr))
            return order;
    }
    for (const auto& t : obs.tickers) {
        if (account.find_holding(t.ticker) != nullptr) continue;
        if (signal_for(t, false).direction == SignalDirection::long_entry &&
            make_buy(t, account.cash))
            return order;
    }
    return order;
}

} // namespace arena
