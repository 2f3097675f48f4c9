#pragma once

// Shared test utilities: a portable deterministic RNG (independent of
// libstdc++ distribution internals) and market fixtures.

#include <cstdint>
#include <string>
#include <vector>

#include "arena/config.hpp"
#include "arena/gateway.hpp"
#include "arena/market.hpp"

namespace testutil {

// Scripted backend that also records every prompt it was sent.
class CapturingBackend : public arena::Backend {
public:
    explicit CapturingBackend(std::vector<std::string> replies) : inner_(std::move(replies)) {}

    std::string send(const arena::CompletionRequest& req) override {
        prompts.push_back(req.user_text());
        image_counts.push_back(req.image_count());
        return inner_.send(req);
    }

    std::vector<std::string> prompts;
    std::vector<std::size_t> image_counts;

private:
    arena::ScriptedBackend inner_;
};

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(arena::mix64(seed ^ 0x6a09e667f3bcc909ull)) {}

    std::uint64_t next() {
        state = arena::mix64(state + 0x9e3779b97f4a7c15ull);
        return state;
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) / 9007199254740992.0);
    }
    long long uniform_int(long long lo, long long hi) {  // inclusive
        return lo + static_cast<long long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool chance(double p) { return uniform(0.0, 1.0) < p; }
};

inline arena::StockState make_stock(const std::string& ticker, double price, long long qty_total,
                                    double dps = 0.0) {
    arena::StockState s;
    s.ticker = ticker;
    s.price_curr = price;
    s.day_ref_price = price;
    s.qty_total = qty_total;
    s.dps = dps;
    s.close_history = {price};
    s.begin_day();
    return s;
}

inline arena::AgentAccount make_account(const std::string& id, double cash) {
    arena::AgentAccount a;
    a.agent_id = id;
    a.cash = cash;
    return a;
}

// Table 1/2-shaped config: nine stub agents, three stocks.
inline arena::RunConfig nine_agent_config(std::uint64_t seed, int days, bool fees_and_dividends) {
    arena::RunConfig cfg;
    cfg.seed = seed;
    cfg.days = days;
    cfg.iters = 3;
    cfg.window = 10;
    cfg.market.fluctuation_const = 1.0;
    cfg.market.daily_cap_pct = 0.10;
    cfg.market.wealth_fee_rate = fees_and_dividends ? 0.001 : 0.0;
    cfg.market.dividend_period_days = 1;

    const char* names[] = {"Amy", "Bruce", "Charles", "David", "Ella", "Frank", "Grace", "Hank", "Ivy"};
    const char* professions[] = {"AI Researcher", "Lawyer",     "Doctor",    "Engineer", "Teacher",
                                 "Entrepreneur",  "Accountant", "Architect", "Marketing Manager"};
    const int durations[] = {1, 2, 1, 3, 2, 5, 4, 2, 3};
    for (int i = 0; i < 9; ++i) {
        arena::AgentSpec a;
        a.name = names[i];
        a.backend = arena::AgentBackend::stub;
        a.modality = arena::Modality::textual;
        a.reflection = false;
        a.capital = 100000.0;
        a.duration_years = durations[i];
        a.profession = professions[i];
        cfg.agents.push_back(a);
    }

    auto stock = [&](const char* ticker, double dps, std::vector<double> history, long long qty) {
        arena::StockSpec s;
        s.ticker = ticker;
        s.dps = fees_and_dividends ? dps : 0.0;
        s.history = std::move(history);
        s.qty_total = qty;
        cfg.stocks.push_back(std::move(s));
    };
    stock("A", 22.0, {454.17, 459.44, 465.25, 490.38, 501.03, 511.65, 511.72, 511.79, 511.78, 445.60}, 1200);
    stock("B", 23.0, {354.17, 465.80, 493.27, 502.06, 502.49, 497.32, 486.28, 468.01, 480.61, 465.80}, 1000);
    stock("C", 25.0, {500.47, 440.53, 424.91, 419.75, 420.48, 421.31, 420.12, 421.09, 435.33, 440.60}, 1600);

    cfg.chat.enabled = true;
    cfg.chat.limit = 5;
    cfg.chat.seed_gossip = {"Analysts whisper that one of the listed companies may raise its dividend."};
    return cfg;
}

} // namespace testutil
