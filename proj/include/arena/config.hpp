#pragma once

// Run configuration: agents and stocks in the initialization-table shape,
// market parameters, chat settings, and the mode switch between the arena
// (endogenous prices) and backtests (exogenous prices).

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/common.hpp"
#include "arena/market.hpp"
#include "arena/prompts.hpp"
#include "arena/strategies.hpp"

namespace arena {

using ojson = nlohmann::ordered_json;

enum class AgentBackend { rule, llm, stub };

inline const char* to_string(AgentBackend b) {
    switch (b) {
        case AgentBackend::rule: return "rule";
        case AgentBackend::llm: return "llm";
        default: return "stub";
    }
}

inline AgentBackend agent_backend_from_string(std::string_view s) {
    if (s == "rule") return AgentBackend::rule;
    if (s == "llm") return AgentBackend::llm;
    if (s == "stub") return AgentBackend::stub;
    throw validation_error("unknown agent backend: " + std::string(s));
}

struct AgentSpec {
    std::string name;
    AgentBackend backend = AgentBackend::stub;
    StrategyKind strategy = StrategyKind::buy_hold;  // rule backend only
    StrategyParams params;
    Modality modality = Modality::textual;
    bool reflection = false;
    double capital = 100000.0;
    int duration_years = 1;
    std::string profession;
};

struct StockSpec {
    std::string ticker;
    double dps = 0.0;
    std::vector<double> history;  // historical closes, oldest first
    long long qty_total = 0;
};

struct ChatSettings {
    bool enabled = true;
    int limit = 5;                         // messages per observation
    std::vector<std::string> seed_gossip;  // day-0 gossip fixture
};

struct RunConfig {
    std::uint64_t seed = 0;
    int days = 1;
    int iters = 3;   // intra-day decision rounds (T)
    int window = 10; // trailing closes per observation (W)
    std::string mode = "arena";  // "arena" | "backtest"
    MarketConfig market;
    std::vector<AgentSpec> agents;
    std::vector<StockSpec> stocks;
    ChatSettings chat;
    std::string data_path;    // backtest CSV directory
    std::string prompt_dir;   // optional template overrides
    double temperature = 0.7;

    void validate() const {
        if (agents.empty()) throw validation_error("config: need at least one agent");
        if (days < 1) throw validation_error("config: days must be >= 1");
        if (iters < 1) throw validation_error("config: iters must be >= 1");
        if (window < 1) throw validation_error("config: window must be >= 1");
        if (mode != "arena" && mode != "backtest") throw validation_error("config: unknown mode " + mode);
        {
            std::set<std::string> names;
            for (const auto& a : agents)
                if (!names.insert(a.name).second)
                    throw validation_error("config: duplicate agent name " + a.name);
            std::set<std::string> tickers;
            for (const auto& s : stocks)
                if (!tickers.insert(s.ticker).second)
                    throw validation_error("config: duplicate ticker " + s.ticker);
        }
        if (mode == "arena") {
            if (stocks.empty()) throw validation_error("config: arena mode needs at least one stock");
            for (const auto& s : stocks) {
                if (s.ticker.empty()) throw validation_error("config: stock with empty ticker");
                if (s.history.empty())
                    throw validation_error("config: stock " + s.ticker + " needs an initial price history");
                for (double p : s.history)
                    if (p <= 0.0) throw validation_error("config: stock " + s.ticker + " has non-positive price");
                if (s.qty_total <= 0) throw validation_error("config: stock " + s.ticker + " needs qty_total > 0");
                if (s.dps < 0.0) throw validation_error("config: stock " + s.ticker + " has negative dps");
            }
        }
        market.validate();
        for (const auto& a : agents) {
            if (a.name.empty()) throw validation_error("config: agent with empty name");
            if (a.capital <= 0.0) throw validation_error("config: agent " + a.name + " needs capital > 0");
            if (a.backend == AgentBackend::rule) a.params.validate();
        }
    }
};

inline ojson to_json(const RunConfig& cfg) {
    ojson j;
    j["seed"] = cfg.seed;
    j["days"] = cfg.days;
    j["iters"] = cfg.iters;
    j["window"] = cfg.window;
    j["mode"] = cfg.mode;
    j["market"] = {{"fluctuation_const", cfg.market.fluctuation_const},
                   {"daily_cap_pct", cfg.market.daily_cap_pct},
                   {"wealth_fee_rate", cfg.market.wealth_fee_rate},
                   {"dividend_period_days", cfg.market.dividend_period_days},
                   {"agent_order_policy",
                    cfg.market.order_policy == AgentOrderPolicy::fixed ? "fixed" : "seeded_shuffle"},
                   {"allow_full_liquidation", cfg.market.allow_full_liquidation}};
    j["agents"] = ojson::array();
    for (const auto& a : cfg.agents) {
        ojson ja;
        ja["name"] = a.name;
        ja["backend"] = to_string(a.backend);
        ja["strategy"] = to_string(a.strategy);
        ja["params"] = {{"sma_short", a.params.sma_short},   {"sma_long", a.params.sma_long},
                        {"zmr_window", a.params.zmr_window}, {"zmr_k", a.params.zmr_k},
                        {"zmr_hold", a.params.zmr_hold},     {"macd_fast", a.params.macd_fast},
                        {"macd_slow", a.params.macd_slow},   {"macd_signal", a.params.macd_signal}};
        ja["modality"] = to_string(a.modality);
        ja["reflection"] = a.reflection;
        ja["capital"] = a.capital;
        ja["duration_years"] = a.duration_years;
        ja["profession"] = a.profession;
        j["agents"].push_back(ja);
    }
    j["stocks"] = ojson::array();
    for (const auto& s : cfg.stocks)
        j["stocks"].push_back({{"ticker", s.ticker},
                               {"dps", s.dps},
                               {"history", s.history},
                               {"qty_total", s.qty_total}});
    j["chat"] = {{"enabled", cfg.chat.enabled}, {"limit", cfg.chat.limit}, {"seed_gossip", cfg.chat.seed_gossip}};
    j["data_path"] = cfg.data_path;
    j["prompt_dir"] = cfg.prompt_dir;
    j["temperature"] = cfg.temperature;
    return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.seed = j.value("seed", 0ull);
    cfg.days = j.value("days", 1);
    cfg.iters = j.value("iters", 3);
    cfg.window = j.value("window", 10);
    cfg.mode = j.value("mode", "arena");
    if (j.contains("market")) {
        const auto& m = j["market"];
        cfg.market.fluctuation_const = m.value("fluctuation_const", 1.0);
        cfg.market.daily_cap_pct = m.value("daily_cap_pct", 0.10);
        cfg.market.wealth_fee_rate = m.value("wealth_fee_rate", 0.001);
        cfg.market.dividend_period_days = m.value("dividend_period_days", 1);
        const std::string policy = m.value("agent_order_policy", std::string("fixed"));
        cfg.market.order_policy = (policy == "seeded_shuffle" || policy == "seeded-shuffle")
                                      ? AgentOrderPolicy::seeded_shuffle
                                      : AgentOrderPolicy::fixed;
        cfg.market.allow_full_liquidation = m.value("allow_full_liquidation", false);
    }
    for (const auto& ja : j.value("agents", nlohmann::json::array())) {
        AgentSpec a;
        a.name = ja.value("name", "");
        a.backend = agent_backend_from_string(ja.value("backend", "stub"));
        a.strategy = strategy_kind_from_string(ja.value("strategy", "buy_hold"));
        if (ja.contains("params")) {
            const auto& p = ja["params"];
            a.params.sma_short = p.value("sma_short", a.params.sma_short);
            a.params.sma_long = p.value("sma_long", a.params.sma_long);
            a.params.zmr_window = p.value("zmr_window", a.params.zmr_window);
            a.params.zmr_k = p.value("zmr_k", a.params.zmr_k);
            a.params.zmr_hold = p.value("zmr_hold", a.params.zmr_hold);
            a.params.macd_fast = p.value("macd_fast", a.params.macd_fast);
            a.params.macd_slow = p.value("macd_slow", a.params.macd_slow);
            a.params.macd_signal = p.value("macd_signal", a.params.macd_signal);
        }
        a.modality = modality_from_string(ja.value("modality", "textual"));
        a.reflection = ja.value("reflection", false);
        a.capital = ja.value("capital", 100000.0);
        a.duration_years = ja.value("duration_years", 1);
        a.profession = ja.value("profession", "");
        cfg.agents.push_back(std::move(a));
    }
    for (const auto& js : j.value("stocks", nlohmann::json::array())) {
        StockSpec s;
        s.ticker = js.value("ticker", "");
        s.dps = js.value("dps", 0.0);
        s.history = js.value("history", std::vector<double>{});
        s.qty_total = js.value("qty_total", 0ll);
        cfg.stocks.push_back(std::move(s));
    }
    if (j.contains("chat")) {
        const auto& c = j["chat"];
        cfg.chat.enabled = c.value("enabled", true);
        cfg.chat.limit = c.value("limit", 5);
        cfg.chat.seed_gossip = c.value("seed_gossip", std::vector<std::string>{});
    }
    cfg.data_path = j.value("data_path", "");
    cfg.prompt_dir = j.value("prompt_dir", "");
    cfg.temperature = j.value("temperature", 0.7);
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw lookup_error("cannot open config: " + path);
    nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
    if (j.is_discarded()) throw validation_error("config is not valid JSON: " + path);
    RunConfig cfg = config_from_json(j);
    cfg.validate();
    return cfg;
}

} // namespace arena
