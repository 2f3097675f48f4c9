#pragma once

// Trading agents behind one interface: rule-based baselines with position
// bookkeeping, and the LLM pipeline agent (analysis, decision, memory,
// optional reflection, gossip).

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "arena/config.hpp"
#include "arena/memory.hpp"
#include "arena/pipeline.hpp"
#include "arena/strategies.hpp"

namespace arena {

class Trader {
public:
    virtual ~Trader() = default;

    virtual void begin_day(int date) { (void)date; }
    virtual Order act(const Observation& obs, const AgentAccount& account, int iter) = 0;
    virtual void on_trade(const TradeRecord& rec) { (void)rec; }

    // Trailing closes this agent needs beyond the configured window
    // (indicator lookbacks exceed the observation window W).
    virtual std::size_t min_history() const { return 0; }
    virtual void end_day(double wealth_open, double wealth_close) {
        (void)wealth_open;
        (void)wealth_close;
    }

    // Gossip text for the chat pool; empty when this agent does not post.
    virtual std::string make_gossip() { return {}; }

    // Strategy event payload after reflection, empty otherwise:
    // {score, evaluation, text, next}.
    virtual ojson strategy_event() { return {}; }

    virtual const std::string& strategy_text() const {
        static const std::string none;
        return none;
    }
};

class RuleTrader : public Trader {
public:
    RuleTrader(StrategyKind kind, StrategyParams params, bool allow_full_liquidation)
        : kind_(kind), params_(std::move(params)), allow_full_liquidation_(allow_full_liquidation) {
        params_.validate();
    }

    Order act(const Observation& obs, const AgentAccount& account, int iter) override {
        Order order = rule_agent_decide(kind_, params_, obs, account, pos_, allow_full_liquidation_);
        order.iter = iter;
        return order;
    }

    void on_trade(const TradeRecord& rec) override {
        if (!rec.accepted) return;
        if (rec.order.op == OrderOp::buy)
            pos_.age_days[rec.order.ticker] = 0;
        else if (rec.order.op == OrderOp::sell)
            pos_.age_days.erase(rec.order.ticker);
    }

    void end_day(double, double) override {
        for (auto& [ticker, age] : pos_.age_days) ++age;
    }

    std::size_t min_history() const override {
        switch (kind_) {
            case StrategyKind::sma: return static_cast<std::size_t>(params_.sma_long) + 1;
            case StrategyKind::zmr: return static_cast<std::size_t>(params_.zmr_window);
            case StrategyKind::macd: return static_cast<std::size_t>(params_.macd_slow) + 1;
            default: return 1;
        }
    }

private:
    StrategyKind kind_;
    StrategyParams params_;
    bool allow_full_liquidation_;
    RulePositionState pos_;
};

// Renders charts for an observation and returns their paths; supplied by the
// orchestrator so the trader stays filesystem-agnostic.
using ChartProvider = std::function<std::vector<std::string>(const Observation&, const std::string&)>;

class LlmTrader : public Trader {
public:
    LlmTrader(std::string agent_id, std::shared_ptr<Backend> backend, GatewayConfig gateway_cfg,
              Modality modality, bool reflection, int iters, PromptLibrary lib = {},
              ChartProvider chart_provider = {})
        : agent_id_(std::move(agent_id)),
          backend_(std::move(backend)),
          gateway_cfg_(std::move(gateway_cfg)),
          modality_(modality),
          reflection_(reflection),
          iters_(iters),
          lib_(std::move(lib)),
          chart_provider_(std::move(chart_provider)),
          strategy_("try to maximize profit.") {}

    void begin_day(int date) override {
        findings_for_gossip_ = report_.failed() ? std::vector<std::string>{} : report_.results;
        stm_ = ShortTermMemory(date, iters_);
        report_ = AnalysisReport{};
        pending_strategy_event_ = ojson{};
    }

    Order act(const Observation& obs, const AgentAccount& account, int iter) override {
        (void)account;
        if (iter == 0 || report_.date != obs.date) {
            std::vector<std::string> charts;
            if (modality_ != Modality::textual && chart_provider_)
                charts = chart_provider_(obs, agent_id_);
            report_ = analyze(obs, modality_, charts, *backend_, gateway_cfg_, agent_id_, lib_);
        }
        Order order = decide(obs, report_, strategy_, stm_.to_text(), *backend_, gateway_cfg_, iter, lib_);

        // The decision turn enters short-term memory even when it failed to
        // parse; the digest then records the hold fallback.
        Observation prompt_obs = obs;
        prompt_obs.strategy_text = strategy_;
        const std::string prompt_text =
            build_decision_prompt(prompt_obs, report_.results, stm_.to_text(), lib_, gateway_cfg_.model)
                .user_text();
        ojson out = {{"op", to_string(order.op)},
                     {"ticker", order.ticker},
                     {"qty", order.qty},
                     {"price", order.price_deal}};
        if (static_cast<int>(stm_.steps.size()) < iters_)
            stm_.record_step(prompt_text, out.dump(), digester_);
        return order;
    }

    void end_day(double wealth_open, double wealth_close) override {
        if (!reflection_) return;
        StrategyEntry today;
        today.date = stm_.date;
        today.text = strategy_;
        evaluate_day(stm_, today, *backend_, gateway_cfg_, wealth_open, wealth_close, lib_);
        const StrategyEntry next = reflect(stm_, today, library_, *backend_, gateway_cfg_, lib_);
        pending_strategy_event_ = {{"score", today.score},
                                   {"evaluation", today.evaluation},
                                   {"text", today.text},
                                   {"next", next.text}};
        strategy_ = next.text;
    }

    std::string make_gossip() override {
        try {
            const CompletionRequest req = build_gossip_prompt(findings_for_gossip_, lib_, gateway_cfg_.model);
            const auto result = complete(*backend_, req, gateway_cfg_);
            const auto parsed = parse_json_output(result.raw_text, {"output"});
            if (parsed["output"].is_string()) return parsed["output"].get<std::string>();
        } catch (const gateway_error&) {
        }
        return {};
    }

    ojson strategy_event() override { return pending_strategy_event_; }
    const std::string& strategy_text() const override { return strategy_; }

    const ShortTermMemory& short_term_memory() const { return stm_; }
    const LongTermMemory& library() const { return library_; }
    const AnalysisReport& last_report() const { return report_; }

private:
    std::string agent_id_;
    std::shared_ptr<Backend> backend_;
    GatewayConfig gateway_cfg_;
    Modality modality_;
    bool reflection_;
    int iters_;
    PromptLibrary lib_;
    ChartProvider chart_provider_;
    Digester digester_;

    std::string strategy_;
    ShortTermMemory stm_;
    LongTermMemory library_;
    AnalysisReport report_;
    std::vector<std::string> findings_for_gossip_;
    ojson pending_strategy_event_;
};

// Builds the trader stack for a config, with an injectable backend factory
// so tests can script every agent.
using BackendFactory = std::function<std::shared_ptr<Backend>(const AgentSpec&)>;

} // namespace arena
