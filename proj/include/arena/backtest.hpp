#pragma once

// Historical backtesting over exogenous prices: observations from trailing
// closes, fills at the same-day close with no impact and no cap, daily
// mark-to-market, and the window-ablation harness.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "arena/metrics.hpp"
#include "arena/observation.hpp"
#include "arena/ohlcv.hpp"
#include "arena/traders.hpp"

namespace arena {

using BarsByTicker = std::map<std::string, std::vector<OhlcvBar>>;

struct BacktestOptions {
    double capital = 100000.0;
    int max_orders_per_day = 0;  // 0: one per ticker plus one
};

namespace btdetail {

inline Observation observation_at(const BarsByTicker& bars, std::size_t bar_index, int trading_day,
                                  int window, const AgentAccount& account,
                                  std::size_t min_history = 0) {
    Observation obs;
    obs.date = trading_day;
    obs.window = window;
    const std::size_t take =
        std::min(bar_index + 1, std::max<std::size_t>(static_cast<std::size_t>(window), min_history));
    for (const auto& [ticker, series] : bars) {
        const OhlcvBar& bar = series[bar_index];
        TickerView t;
        t.ticker = ticker;
        const std::size_t begin = bar_index + 1 - take;
        for (std::size_t j = begin; j <= bar_index; ++j) t.closes.push_back(series[j].close);
        t.price_curr = bar.close;
        t.intraday_high = bar.high;
        t.intraday_low = bar.low;
        t.intraday_mean = (bar.high + bar.low + bar.close) / 3.0;
        t.change_pct =
            bar_index > 0 ? (bar.close - series[bar_index - 1].close) / series[bar_index - 1].close * 100.0
                          : 0.0;
        obs.market_index_change_pct += t.change_pct;
        obs.tickers.push_back(std::move(t));
    }
    if (!obs.tickers.empty()) obs.market_index_change_pct /= static_cast<double>(obs.tickers.size());

    double balance = account.cash;
    for (const auto& [ticker, holding] : account.holdings) {
        const auto it = bars.find(ticker);
        if (it == bars.end()) continue;
        const double price = it->second[bar_index].close;
        HoldingView h;
        h.ticker = ticker;
        h.qty = holding.qty;
        h.value = static_cast<double>(holding.qty) * price;
        h.gain_pct =
            holding.cost_price > 0.0 ? (price - holding.cost_price) / holding.cost_price * 100.0 : 0.0;
        h.cost_price = holding.cost_price;
        h.price_curr = price;
        const TickerView* tv = obs.find_ticker(ticker);
        if (tv != nullptr) {
            h.closes = tv->closes;
            h.change_pct = tv->change_pct;
        }
        balance += h.value;
        obs.holdings.push_back(std::move(h));
    }
    obs.portfolio_balance = balance;
    return obs;
}

// Fill at the close, no impact, no cap; full liquidation allowed.
inline TradeRecord fill_at_close(const Order& order, AgentAccount& account, double close) {
    TradeRecord rec;
    rec.order = order;
    rec.executed_price = close;
    rec.price_after = close;
    if (order.op == OrderOp::hold) {
        rec.accepted = true;
        return rec;
    }
    if (order.qty <= 0) {
        rec.reject_reason = RejectReason::invalid_order;
        return rec;
    }
    if (order.op == OrderOp::buy) {
        const double cost = close * static_cast<double>(order.qty);
        if (cost > account.cash) {
            rec.reject_reason = RejectReason::insufficient_cash;
            return rec;
        }
        account.cash -= cost;
        detail::update_cost_basis(account.holdings[order.ticker], order.qty, close);
    } else {
        auto it = account.holdings.find(order.ticker);
        const long long held = it == account.holdings.end() ? 0 : it->second.qty;
        if (order.qty > held) {
            rec.reject_reason = RejectReason::insufficient_shares;
            return rec;
        }
        account.cash += close * static_cast<double>(order.qty);
        it->second.qty -= order.qty;
        if (it->second.qty == 0) account.holdings.erase(it);
    }
    rec.accepted = true;
    return rec;
}

} // namespace btdetail

// Runs one agent over aligned per-ticker bars. Trading starts on the first
// day with a full trailing window; the agent is polled until it holds (or the
// per-day order budget runs out), wealth is marked at each close.
inline BacktestReport run_backtest(const BarsByTicker& bars, Trader& agent, int window,
                                   const BacktestOptions& opts = {}) {
    if (bars.empty()) throw validation_error("run_backtest: no bars");
    const std::size_t n = bars.begin()->second.size();
    for (const auto& [ticker, series] : bars) {
        if (series.size() != n)
            throw validation_error("run_backtest: ticker " + ticker + " has mismatched bar count");
        if (series.size() < static_cast<std::size_t>(window) + 1)
            throw validation_error("run_backtest: ticker " + ticker + " needs >= window+1 bars");
    }

    AgentAccount account;
    account.agent_id = "backtest";
    account.cash = opts.capital;

    EquityCurve curve;
    const int budget = opts.max_orders_per_day > 0 ? opts.max_orders_per_day
                                                   : static_cast<int>(bars.size()) + 1;

    int trading_day = 0;
    for (std::size_t i = static_cast<std::size_t>(window) - 1; i < n; ++i, ++trading_day) {
        agent.begin_day(trading_day);
        for (int k = 0; k < budget; ++k) {
            const Observation obs =
                btdetail::observation_at(bars, i, trading_day, window, account, agent.min_history());
            Order order = agent.act(obs, account, k);
            order.agent_id = account.agent_id;
            order.date = trading_day;
            order.iter = k;
            if (order.op == OrderOp::hold) break;
            const auto it = bars.find(order.ticker);
            if (it == bars.end()) break;
            const TradeRecord rec = btdetail::fill_at_close(order, account, it->second[i].close);
            agent.on_trade(rec);
            if (!rec.accepted) break;
        }

        double wealth = account.cash;
        for (const auto& [ticker, holding] : account.holdings)
            wealth += static_cast<double>(holding.qty) * bars.at(ticker)[i].close;
        const double open_wealth = curve.wealth.empty() ? opts.capital : curve.wealth.back();
        curve.dates.push_back(trading_day);
        curve.wealth.push_back(wealth);
        account.wealth_history.push_back(wealth);
        agent.end_day(open_wealth, wealth);
    }

    BacktestReport rep = summarize_curve(curve, opts.capital);
    rep.window = window;
    rep.config_echo = "window=" + std::to_string(window) + " capital=" + fmt_fixed(opts.capital) +
                      " tickers=" + std::to_string(bars.size()) +
                      " trading_days=" + std::to_string(curve.wealth.size());
    return rep;
}

using TraderFactory = std::function<std::unique_ptr<Trader>(int window)>;

struct AblationRow {
    std::string label;
    BacktestReport report;
};

// One backtest per (label, window); rows grouped by label in the Table-6
// shape (rows = label x window, columns = TR/Mean/Std/WR/SR).
inline std::vector<AblationRow> window_ablation(const BarsByTicker& bars,
                                                const std::vector<std::pair<std::string, TraderFactory>>& factories,
                                                const std::vector<int>& windows = {5, 10, 15, 20},
                                                const BacktestOptions& opts = {}) {
    std::vector<AblationRow> rows;
    for (const auto& [label, factory] : factories) {
        for (int window : windows) {
            auto trader = factory(window);
            BacktestReport rep = run_backtest(bars, *trader, window, opts);
            rep.label = label;
            rows.push_back({label, std::move(rep)});
        }
    }
    return rows;
}

inline std::string format_ablation_table(const std::vector<AblationRow>& rows) {
    std::string out = "Input        Window   TR %     Mean %   Std %    WR %     SR\n";
    out += "------------ -------- -------- -------- -------- -------- --------\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%-12s %-8d %8.2f %8.3f %8.3f %8.1f %8s\n", row.label.c_str(),
                      row.report.window, row.report.tr_pct, row.report.mean_pct, row.report.std_pct,
                      row.report.wr_pct,
                      row.report.sr_defined ? fmt_fixed(row.report.sr, 3).c_str() : "undef");
        out += buf;
    }
    return out;
}

} // namespace arena
