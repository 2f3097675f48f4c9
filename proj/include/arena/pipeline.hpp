#pragma once

// Three-stage agent pipeline: investment analysis (3 findings), action
// decision, and submission-time validation mirroring the market's
// accept/reject rules without mutating state.

#include <optional>
#include <string>
#include <vector>

#include "arena/gateway.hpp"
#include "arena/market.hpp"
#include "arena/observation.hpp"
#include "arena/prompts.hpp"

namespace arena {

struct AnalysisReport {
    std::vector<std::string> results;  // exactly 3 findings, or empty sentinel on failure
    int date = 0;
    std::string agent_id;

    bool failed() const { return results.empty(); }
};

namespace pipedetail {

inline constexpr const char* repair_note =
    "\n\nYour previous response could not be parsed. Reply with exactly the requested JSON format "
    "and nothing else.";

// complete + JSON extraction with bounded repair reprompts.
inline std::optional<nlohmann::json> complete_json(Backend& backend, CompletionRequest req,
                                                   const GatewayConfig& cfg,
                                                   const std::vector<std::string>& required_keys,
                                                   int max_repairs = 2) {
    for (int attempt = 0; attempt <= max_repairs; ++attempt) {
        std::string raw;
        try {
            raw = complete(backend, req, cfg).raw_text;
        } catch (const gateway_error&) {
            return std::nullopt;
        }
        try {
            return parse_json_output(raw, required_keys);
        } catch (const parse_error&) {
            if (attempt == max_repairs) return std::nullopt;
            for (auto& part : req.user_parts)
                if (part.kind == UserPart::Kind::text) {
                    part.value += repair_note;
                    break;
                }
        }
    }
    return std::nullopt;
}

// Splits "The analysis results: - a\n- b\n- c" into individual findings.
inline std::vector<std::string> split_findings(const std::string& output) {
    std::vector<std::string> findings;
    std::size_t pos = output.find('-');
    while (pos != std::string::npos) {
        std::size_t end = output.find("\n-", pos);
        std::string item = output.substr(pos + 1, end == std::string::npos ? std::string::npos
                                                                           : end - pos - 1);
        const auto b = item.find_first_not_of(" \t\r\n");
        const auto e = item.find_last_not_of(" \t\r\n");
        if (b != std::string::npos) findings.push_back(item.substr(b, e - b + 1));
        pos = end == std::string::npos ? std::string::npos : end + 1;
    }
    return findings;
}

} // namespace pipedetail

// Analysis stage: sends the modality-appropriate prompt, parses {"output"},
// and normalizes to exactly 3 findings (truncating or padding). Gateway or
// parse failure after repairs yields the empty-report sentinel; the decision
// stage then holds.
inline AnalysisReport analyze(const Observation& obs, Modality modality,
                              const std::vector<std::string>& chart_paths, Backend& backend,
                              const GatewayConfig& cfg, const std::string& agent_id,
                              const PromptLibrary& lib = {}) {
    AnalysisReport report;
    report.date = obs.date;
    report.agent_id = agent_id;

    CompletionRequest req = build_analysis_prompt(obs, modality, chart_paths, lib, cfg.model);
    req.temperature = cfg.temperature;
    const auto parsed = pipedetail::complete_json(backend, std::move(req), cfg, {"output"});
    if (!parsed || !(*parsed)["output"].is_string()) return report;

    auto findings = pipedetail::split_findings((*parsed)["output"].get<std::string>());
    if (findings.empty()) return report;
    findings.resize(3, "no additional finding");
    report.results = std::move(findings);
    return report;
}

// Decision stage: one order per call. Unparseable or failed output falls
// back to hold, as does an empty analysis sentinel.
inline Order decide(const Observation& obs, const AnalysisReport& report,
                    const std::string& strategy_text, const std::string& short_term_memory_text,
                    Backend& backend, const GatewayConfig& cfg, int iter,
                    const PromptLibrary& lib = {}) {
    Order order;
    order.agent_id = report.agent_id;
    order.date = obs.date;
    order.iter = iter;
    if (report.failed()) return order;

    Observation prompt_obs = obs;
    prompt_obs.strategy_text = strategy_text;
    CompletionRequest req =
        build_decision_prompt(prompt_obs, report.results, short_term_memory_text, lib, cfg.model);
    req.temperature = cfg.temperature;
    const auto parsed = pipedetail::complete_json(backend, std::move(req), cfg, {"op"});
    if (!parsed) return order;

    try {
        const auto& j = *parsed;
        const std::string op = j.value("op", "hold");
        if (op != "buy" && op != "sell") return order;
        order.op = op == "buy" ? OrderOp::buy : OrderOp::sell;
        order.ticker = j.value("ticker", "");
        if (j.contains("qty")) {
            if (j["qty"].is_number())
                order.qty = static_cast<long long>(j["qty"].get<double>());
            else if (j["qty"].is_string())
                order.qty = std::strtoll(j["qty"].get<std::string>().c_str(), nullptr, 10);
        }
        if (j.contains("price")) {
            if (j["price"].is_number())
                order.price_deal = j["price"].get<double>();
            else if (j["price"].is_string())
                order.price_deal = std::strtod(j["price"].get<std::string>().c_str(), nullptr);
        }
        if (order.ticker.empty() || order.qty <= 0 || order.price_deal <= 0.0) {
            order.op = OrderOp::hold;
            order.ticker.clear();
            order.qty = 0;
            order.price_deal = 0.0;
        }
    } catch (const nlohmann::json::exception&) {
        order = Order{};
        order.agent_id = report.agent_id;
        order.date = obs.date;
        order.iter = iter;
    }
    return order;
}

struct ActionValidation {
    bool ok = false;
    RejectReason reason = RejectReason::none;
};

// Pre-submission check of the market's accept/reject conditions (cash at the
// capped price, strictly positive sell remainder, qty > 0, known ticker)
// without touching state. Must agree with execute_order on every order.
inline ActionValidation validate_action(const Order& order, const AgentAccount& account,
                                        const std::vector<StockState>& stocks,
                                        const MarketConfig& cfg) {
    if (order.op == OrderOp::hold) return {true, RejectReason::none};
    if (order.qty <= 0 || order.price_deal <= 0.0) return {false, RejectReason::invalid_order};

    const StockState* stock = nullptr;
    for (const auto& s : stocks)
        if (s.ticker == order.ticker) stock = &s;
    if (stock == nullptr) return {false, RejectReason::unknown_ticker};

    const double tentative = apply_price_impact(stock->price_curr, order.price_deal, order.qty,
                                                cfg.fluctuation_const, stock->qty_total);
    const double executed = clamp_to_daily_cap(tentative, stock->day_ref_price, cfg.daily_cap_pct);

    if (order.op == OrderOp::buy) {
        if (executed * static_cast<double>(order.qty) > account.cash)
            return {false, RejectReason::insufficient_cash};
        return {true, RejectReason::none};
    }
    const Holding* h = account.find_holding(order.ticker);
    const long long held = h == nullptr ? 0 : h->qty;
    const long long remainder = held - order.qty;
    if (cfg.allow_full_liquidation ? remainder >= 0 : remainder > 0) return {true, RejectReason::none};
    return {false, RejectReason::insufficient_shares};
}

} // namespace arena
