#pragma once

// Market core: order execution against the price-impact rule, the daily
// fluctuation cap, dividends, the daily wealth fee, and the closed-ledger
// accounting that keeps the competition zero-sum.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arena/common.hpp"

namespace arena {

enum class OrderOp { buy, sell, hold };

enum class RejectReason { none, insufficient_cash, insufficient_shares, invalid_order, unknown_ticker };

inline const char* to_string(OrderOp op) {
    switch (op) {
        case OrderOp::buy: return "buy";
        case OrderOp::sell: return "sell";
        default: return "hold";
    }
}

inline const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::insufficient_cash: return "insufficient_cash";
        case RejectReason::insufficient_shares: return "insufficient_shares";
        case RejectReason::invalid_order: return "invalid_order";
        case RejectReason::unknown_ticker: return "unknown_ticker";
        default: return "";
    }
}

inline OrderOp order_op_from_string(std::string_view s) {
    if (s == "buy") return OrderOp::buy;
    if (s == "sell") return OrderOp::sell;
    if (s == "hold") return OrderOp::hold;
    throw validation_error("unknown order op: " + std::string(s));
}

struct Order {
    std::string agent_id;
    OrderOp op = OrderOp::hold;
    std::string ticker;
    long long qty = 0;        // shares; 0 iff hold
    double price_deal = 0.0;  // agent-quoted execution price
    int date = 0;
    int iter = 0;
};

struct TradeRecord {
    Order order;
    double executed_price = 0.0;
    bool accepted = false;
    RejectReason reject_reason = RejectReason::none;
    double price_after = 0.0;  // market price once the order is settled
};

struct Holding {
    long long qty = 0;
    double cost_price = 0.0;  // quantity-weighted average buy price
};

struct AgentProfile {
    std::string name;
    int duration_years = 1;
    std::string profession;
};

struct AgentAccount {
    std::string agent_id;
    double cash = 0.0;
    std::map<std::string, Holding> holdings;
    AgentProfile profile;
    bool fee_shortfall = false;           // set when a wealth fee could not be covered
    std::vector<double> wealth_history;   // end-of-day mark-to-market

    const Holding* find_holding(const std::string& ticker) const {
        auto it = holdings.find(ticker);
        return it == holdings.end() ? nullptr : &it->second;
    }
};

struct StockState {
    std::string ticker;
    double price_curr = 0.0;
    long long qty_total = 0;  // float in the market, constant
    double dps = 0.0;         // dividend per share
    double day_ref_price = 0.0;
    std::vector<double> close_history;

    // Intraday trace over the day's opening price and every executed price.
    double intraday_high = 0.0;
    double intraday_low = 0.0;
    double intraday_sum = 0.0;
    long long intraday_count = 0;

    double intraday_mean() const { return intraday_count > 0 ? intraday_sum / intraday_count : price_curr; }

    double day_change_pct() const {
        return day_ref_price > 0.0 ? (price_curr - day_ref_price) / day_ref_price * 100.0 : 0.0;
    }

    void begin_day() {
        intraday_high = price_curr;
        intraday_low = price_curr;
        intraday_sum = price_curr;
        intraday_count = 1;
    }

    void observe_execution(double px) {
        intraday_high = std::max(intraday_high, px);
        intraday_low = std::min(intraday_low, px);
        intraday_sum += px;
        ++intraday_count;
    }
};

enum class AgentOrderPolicy { fixed, seeded_shuffle };

struct MarketConfig {
    double fluctuation_const = 1.0;  // F in the price update
    double daily_cap_pct = 0.10;
    double wealth_fee_rate = 0.001;  // per day, on mark-to-market wealth
    int dividend_period_days = 1;
    AgentOrderPolicy order_policy = AgentOrderPolicy::fixed;
    bool allow_full_liquidation = false;

    void validate() const {
        if (fluctuation_const <= 0.0) throw validation_error("fluctuation_const must be > 0");
        if (daily_cap_pct <= 0.0 || daily_cap_pct > 1.0) throw validation_error("daily_cap_pct must be in (0, 1]");
        if (wealth_fee_rate < 0.0 || wealth_fee_rate >= 1.0) throw validation_error("wealth_fee_rate must be in [0, 1)");
        if (dividend_period_days < 1) throw validation_error("dividend_period_days must be >= 1");
    }
};

struct CashFlow {
    enum class Kind { dividend, fee } kind = Kind::dividend;
    std::string agent_id;
    double amount = 0.0;  // positive = credited to the agent
    int date = 0;
};

// Weighted average of the deal price and the current price; an order's
// quantity pulls the quote toward the deal price, scaled by F against the
// total float.
inline double apply_price_impact(double price_curr, double price_deal, long long qty,
                                 double fluctuation_const, long long qty_total) {
    if (price_curr <= 0.0 || qty_total <= 0 || fluctuation_const <= 0.0)
        throw std::domain_error("apply_price_impact: price_curr, qty_total and F must be positive");
    if (qty < 0) throw std::domain_error("apply_price_impact: qty must be >= 0");
    if (qty == 0) return price_curr;
    if (price_deal <= 0.0) throw std::domain_error("apply_price_impact: price_deal must be positive");
    const double w = static_cast<double>(qty) * fluctuation_const;
    const double q = static_cast<double>(qty_total);
    return (price_deal * w + price_curr * q) / (w + q);
}

// Clips a candidate execution price into the band around the previous close.
inline double clamp_to_daily_cap(double candidate, double day_ref, double cap_pct) {
    const double lo = day_ref * (1.0 - cap_pct);
    const double hi = day_ref * (1.0 + cap_pct);
    return std::clamp(candidate, lo, hi);
}

namespace detail {

inline void update_cost_basis(Holding& h, long long qty, double price) {
    const double held = static_cast<double>(h.qty);
    const double added = static_cast<double>(qty);
    h.cost_price = h.qty == 0 ? price : (h.cost_price * held + price * added) / (held + added);
    h.qty += qty;
}

} // namespace detail

// Executes one order against a single stock, mutating account and stock only
// when the order commits. Buys need cost <= cash; sells must leave a strictly
// positive remainder unless cfg.allow_full_liquidation.
inline TradeRecord execute_order(const Order& order, AgentAccount& account, StockState& stock,
                                 const MarketConfig& cfg) {
    if (order.ticker != stock.ticker && order.op != OrderOp::hold)
        throw lookup_error("execute_order: order ticker '" + order.ticker + "' does not match stock '" +
                           stock.ticker + "'");

    TradeRecord rec;
    rec.order = order;
    rec.price_after = stock.price_curr;

    if (order.op == OrderOp::hold) {
        rec.accepted = true;
        rec.executed_price = stock.price_curr;
        return rec;
    }

    if (order.qty <= 0 || order.price_deal <= 0.0) {
        rec.reject_reason = RejectReason::invalid_order;
        return rec;
    }

    const double tentative = apply_price_impact(stock.price_curr, order.price_deal, order.qty,
                                                cfg.fluctuation_const, stock.qty_total);
    const double executed = clamp_to_daily_cap(tentative, stock.day_ref_price, cfg.daily_cap_pct);
    rec.executed_price = executed;

    if (order.op == OrderOp::buy) {
        const double cost = executed * static_cast<double>(order.qty);
        if (cost > account.cash) {
            rec.reject_reason = RejectReason::insufficient_cash;
            return rec;
        }
        account.cash -= cost;
        detail::update_cost_basis(account.holdings[order.ticker], order.qty, executed);
    } else {  // sell
        auto it = account.holdings.find(order.ticker);
        const long long held = it == account.holdings.end() ? 0 : it->second.qty;
        const long long remainder = held - order.qty;
        const bool ok = cfg.allow_full_liquidation ? remainder >= 0 : remainder > 0;
        if (!ok) {
            rec.reject_reason = RejectReason::insufficient_shares;
            return rec;
        }
        account.cash += executed * static_cast<double>(order.qty);
        it->second.qty = remainder;
        if (remainder == 0) account.holdings.erase(it);
    }

    stock.price_curr = executed;
    stock.observe_execution(executed);
    rec.accepted = true;
    rec.price_after = executed;
    return rec;
}

// Mark-to-market wealth: cash plus holdings valued at current prices.
inline double mark_to_market(const AgentAccount& account, const std::vector<StockState>& stocks) {
    double wealth = account.cash;
    for (const auto& [ticker, holding] : account.holdings) {
        auto it = std::find_if(stocks.begin(), stocks.end(),
                               [&](const StockState& s) { return s.ticker == ticker; });
        if (it == stocks.end()) throw lookup_error("mark_to_market: unknown ticker '" + ticker + "'");
        wealth += static_cast<double>(holding.qty) * it->price_curr;
    }
    return wealth;
}

// On schedule days, credits each account with qty * dps per holding. Dividend
// cash is minted by the environment; the only non-zero-sum inflow.
inline std::vector<CashFlow> pay_dividends(std::vector<AgentAccount>& accounts,
                                           const std::vector<StockState>& stocks, int day,
                                           const MarketConfig& cfg) {
    std::vector<CashFlow> flows;
    if (day < 0) throw validation_error("pay_dividends: day must be >= 0");
    if (day % cfg.dividend_period_days != 0) return flows;
    for (auto& account : accounts) {
        double payout = 0.0;
        for (const auto& [ticker, holding] : account.holdings) {
            auto it = std::find_if(stocks.begin(), stocks.end(),
                                   [&](const StockState& s) { return s.ticker == ticker; });
            if (it == stocks.end()) throw lookup_error("pay_dividends: unknown ticker '" + ticker + "'");
            payout += static_cast<double>(holding.qty) * it->dps;
        }
        if (payout > 0.0) {
            account.cash += payout;
            flows.push_back({CashFlow::Kind::dividend, account.agent_id, payout, day});
        }
    }
    return flows;
}

// Debits each account by rate * mark-to-market wealth; accounts that cannot
// cover the fee are drained to zero and flagged.
inline std::vector<CashFlow> charge_wealth_fee(std::vector<AgentAccount>& accounts,
                                               const std::vector<StockState>& stocks,
                                               const MarketConfig& cfg, int day = 0) {
    std::vector<CashFlow> flows;
    if (cfg.wealth_fee_rate <= 0.0) return flows;
    for (auto& account : accounts) {
        const double fee = cfg.wealth_fee_rate * mark_to_market(account, stocks);
        if (fee <= 0.0) continue;
        double charged = fee;
        if (charged > account.cash) {
            charged = account.cash;
            account.fee_shortfall = true;
        }
        account.cash -= charged;
        flows.push_back({CashFlow::Kind::fee, account.agent_id, -charged, day});
    }
    return flows;
}

// Closes the trading day: the cap band re-anchors at today's close and the
// close is appended to each stock's history.
inline void roll_day(std::vector<StockState>& stocks) {
    for (auto& stock : stocks) {
        stock.day_ref_price = stock.price_curr;
        stock.close_history.push_back(stock.price_curr);
    }
}

// Running totals for the ledger identity
//   sum cash_t = sum cash_0 - buys + sells + dividends - fees.
// market_cash is the environment counterparty balance (buys - sells); agent
// cash plus market_cash is invariant up to dividends and fees.
struct LedgerTotals {
    double initial_cash = 0.0;
    double buy_cost = 0.0;
    double sell_proceeds = 0.0;
    double dividends = 0.0;
    double fees = 0.0;

    double market_cash() const { return buy_cost - sell_proceeds; }
    double expected_agent_cash() const { return initial_cash - buy_cost + sell_proceeds + dividends - fees; }

    void record(const TradeRecord& rec) {
        if (!rec.accepted || rec.order.op == OrderOp::hold) return;
        const double value = rec.executed_price * static_cast<double>(rec.order.qty);
        if (rec.order.op == OrderOp::buy)
            buy_cost += value;
        else
            sell_proceeds += value;
    }

    void record(const CashFlow& flow) {
        if (flow.kind == CashFlow::Kind::dividend)
            dividends += flow.amount;
        else
            fees += -flow.amount;
    }
};

inline double total_cash(const std::vector<AgentAccount>& accounts) {
    double sum = 0.0;
    for (const auto& a : accounts) sum += a.cash;
    return sum;
}

// Aggregate simulated market: stocks, accounts and the running ledger.
struct Market {
    std::vector<StockState> stocks;
    std::vector<AgentAccount> accounts;
    MarketConfig config;
    LedgerTotals ledger;

    StockState& stock(const std::string& ticker) {
        for (auto& s : stocks)
            if (s.ticker == ticker) return s;
        throw lookup_error("unknown ticker '" + ticker + "'");
    }

    const StockState* find_stock(const std::string& ticker) const {
        for (const auto& s : stocks)
            if (s.ticker == ticker) return &s;
        return nullptr;
    }

    AgentAccount& account(const std::string& agent_id) {
        for (auto& a : accounts)
            if (a.agent_id == agent_id) return a;
        throw lookup_error("unknown agent '" + agent_id + "'");
    }

    TradeRecord submit(const Order& order) {
        if (order.op == OrderOp::hold) {
            TradeRecord rec;
            rec.order = order;
            rec.accepted = true;
            rec.executed_price = 0.0;
            return rec;
        }
        AgentAccount& acct = account(order.agent_id);
        StockState& stk = stock(order.ticker);
        TradeRecord rec = execute_order(order, acct, stk, config);
        ledger.record(rec);
        return rec;
    }

    double ledger_drift() const { return total_cash(accounts) - ledger.expected_agent_cash(); }
};

} // namespace arena
