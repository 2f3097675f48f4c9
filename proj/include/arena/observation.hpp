#pragma once

// The per-agent view of the market handed to both rule strategies and the
// LLM prompt builders: trailing closes, intraday stats, gossip, holdings and
// the current strategy text.

#include <string>
#include <vector>

namespace arena {

struct TickerView {
    std::string ticker;
    std::vector<double> closes;  // last W closes, oldest first
    double dps = 0.0;
    double price_curr = 0.0;
    double intraday_high = 0.0;
    double intraday_low = 0.0;
    double intraday_mean = 0.0;
    double change_pct = 0.0;  // vs previous close
};

struct HoldingView {
    std::string ticker;
    long long qty = 0;
    double value = 0.0;  // qty * current price
    double gain_pct = 0.0;
    double cost_price = 0.0;
    std::vector<double> closes;
    double price_curr = 0.0;
    double change_pct = 0.0;
};

struct Observation {
    int date = 0;
    int window = 10;  // W: trailing closes per ticker
    std::vector<TickerView> tickers;
    double market_index_change_pct = 0.0;
    std::vector<std::string> gossip;
    double portfolio_balance = 0.0;  // mark-to-market
    std::vector<HoldingView> holdings;
    std::string strategy_text;

    const TickerView* find_ticker(const std::string& ticker) const {
        for (const auto& t : tickers)
            if (t.ticker == ticker) return &t;
        return nullptr;
    }
};

} // namespace arena
