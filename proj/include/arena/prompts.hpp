#pragma once

// Prompt templates and renderers for the agent pipeline stages: analysis
// (text-only / visual-only / combined), action decision, gossip, end-of-day
// evaluation and strategy reflection. Templates carry named {{placeholders}}
// and can be overridden by files on disk (see PromptLibrary::load_dir).

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "arena/common.hpp"
#include "arena/gateway.hpp"
#include "arena/observation.hpp"

namespace arena {

enum class Modality { textual, visual, combined };

inline const char* to_string(Modality m) {
    switch (m) {
        case Modality::textual: return "textual";
        case Modality::visual: return "visual";
        default: return "combined";
    }
}

inline Modality modality_from_string(std::string_view s) {
    if (s == "textual") return Modality::textual;
    if (s == "visual") return Modality::visual;
    if (s == "combined") return Modality::combined;
    throw validation_error("unknown modality: " + std::string(s));
}

// Stage markers the stub backend keys on; each appears verbatim in exactly
// one template's Task.
namespace markers {
inline constexpr const char* analysis = "summarize and conclude the 3";
inline constexpr const char* decision = "Decide your next trading action";
inline constexpr const char* gossip = "Write one short market rumor";
inline constexpr const char* evaluation = "Evaluate today's trading trajectory";
inline constexpr const char* reflection = "Propose the strategy you will follow tomorrow";
} // namespace markers

namespace prompt_text {

inline constexpr const char* analysis_template = R"(Instructions:
    - You are a player participating in a Simulated Stock Trading Challenge where the prices of stocks are determined mainly by the bids made by the participants in the challenge.
    - You will be given information related to specific stocks, the whole market, and your existing investments, which is used to analyze the current stock market and investment situation.
    - Your overall objective is to make as much profit as possible.

Stock information:
{{stock_information}}

Market information:
    Current market index change: {{market_index_change}}%

Gossip from other people:
{{gossip}}

Existing Investments:
    Your total portfolio balance is {{portfolio_balance}}, you are holding the following stocks:
{{existing_investments}}

Investment strategy:
{{investment_strategy}}

Task:
    - Based on (but not limited to) the following information, you need to summarize and conclude the 3 most important and valuable analysis results from the above information. The analysis results must fully fit the focus of the investment strategy, and each result should describe the relationship between its content and investment strategy. In the next stage, the analysis results will be referred for the decision to buy or sell:
    - Stock information
    - Market information
    - Your existing investments
    - Your investment strategy
    - Gossip from other people (Gossip may be real or fake news.)
{{task_visual_bullet}}
Output the response to the prompt above in JSON. Each analysis result should be started with "-", and ended with a line break.

Please only provide the response in the following format:

{"output": "The analysis results: [analysis results]"}
)";

inline constexpr const char* decision_template = R"(Instructions:
    - You are a player participating in a Simulated Stock Trading Challenge where the prices of stocks are determined mainly by the bids made by the participants in the challenge.
    - Your overall objective is to make as much profit as possible.

Analysis results:
{{analysis_results}}

Today's trading memory:
{{short_term_memory}}

Stock information:
{{stock_information}}

Existing Investments:
    Your total portfolio balance is {{portfolio_balance}}, you are holding the following stocks:
{{existing_investments}}

Investment strategy:
{{investment_strategy}}

Task:
    - Decide your next trading action for this iteration: buy, sell, or hold one stock. Respect your available cash and current holdings.

Please only provide the response in the following format:

{"op": "[buy|sell|hold]", "ticker": "[ticker]", "qty": [integer number of shares], "price": [proposed deal price]}
)";

inline constexpr const char* gossip_template = R"(Instructions:
    - You are a player participating in a Simulated Stock Trading Challenge.
    - Write one short market rumor for the public chat pool, based on your stock market analysis from the previous day. It may be optimistic or pessimistic, and it does not have to be true.

Your previous analysis:
{{analysis_results}}

Please only provide the response in the following format:

{"output": "[rumor text]"}
)";

inline constexpr const char* evaluation_template = R"(Instructions:
    - You are reviewing one day of your own trading in a Simulated Stock Trading Challenge.
    - Evaluate today's trading trajectory against the strategy you followed: what worked, what did not, and why.

Today's trading memory:
{{short_term_memory}}

Investment strategy:
{{investment_strategy}}

Daily result:
    - Wealth change today: {{day_return_pct}}%

Please only provide the response in the following format:

{"output": "[evaluation]"}
)";

inline constexpr const char* reflection_template = R"(Instructions:
    - You are refining your trading strategy in a Simulated Stock Trading Challenge.
    - Propose the strategy you will follow tomorrow. Learn from today's evaluation, reinforce what your best strategies did, and avoid what your worst strategies did.

Today's trading memory:
{{short_term_memory}}

Today's evaluation:
{{evaluation}}

Current strategy:
{{investment_strategy}}

Best-performing strategies:
{{top_strategies}}

Worst-performing strategies:
{{bottom_strategies}}

Please only provide the response in the following format:

{"output": "[next strategy]"}
)";

} // namespace prompt_text

struct PromptLibrary {
    std::string analysis = prompt_text::analysis_template;
    std::string decision = prompt_text::decision_template;
    std::string gossip = prompt_text::gossip_template;
    std::string evaluation = prompt_text::evaluation_template;
    std::string reflection = prompt_text::reflection_template;

    // Overrides built-ins with {name}.txt files found in dir.
    static PromptLibrary load_dir(const std::string& dir) {
        PromptLibrary lib;
        auto maybe = [&](const char* name, std::string& slot) {
            const auto path = std::filesystem::path(dir) / (std::string(name) + ".txt");
            std::ifstream f(path);
            if (!f) return;
            slot.assign((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        };
        maybe("analysis", lib.analysis);
        maybe("decision", lib.decision);
        maybe("gossip", lib.gossip);
        maybe("evaluation", lib.evaluation);
        maybe("reflection", lib.reflection);
        return lib;
    }
};

inline std::string render_template(std::string tpl,
                                   const std::map<std::string, std::string>& values) {
    for (const auto& [key, value] : values) {
        const std::string needle = "{{" + key + "}}";
        std::size_t pos = 0;
        while ((pos = tpl.find(needle, pos)) != std::string::npos) {
            tpl.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    return tpl;
}

namespace promptdetail {

inline std::string fmt_smart(double v) {
    if (v == static_cast<long long>(v) && std::abs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    return fmt_fixed(v, 2);
}

inline std::string stock_blocks_text(const Observation& obs) {
    std::string out;
    for (const auto& t : obs.tickers) {
        out += "    - " + t.ticker + ":\n";
        out += "        - The closing prices in the past " + std::to_string(t.closes.size()) +
               " days are: " + fmt_price_list(t.closes) + "\n";
        out += "        - Dividend per share: " + fmt_smart(t.dps) + "\n";
        out += "        - Current price change: " + fmt_signed_pct(t.change_pct) +
               ", Current price: " + fmt_fixed(t.price_curr) + "\n";
        out += "        - Intraday High: " + fmt_fixed(t.intraday_high) + "\n";
        out += "        - Intraday Low: " + fmt_fixed(t.intraday_low) + "\n";
        out += "        - Intraday Mean: " + fmt_fixed(t.intraday_mean) + "\n";
    }
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

inline std::string stock_blocks_visual(const Observation& obs) {
    std::string out = "    - See the attached stock information visualizations:\n";
    char label = 'a';
    for (const auto& t : obs.tickers) {
        out += "        - (";
        out += label++;
        out += ") Stock " + t.ticker + " Price\n";
    }
    out += "        - (";
    out += label++;
    out += ") Buy & Sell Assert\n";
    out += "        - (";
    out += label;
    out += ") Trading Record";
    return out;
}

inline std::string gossip_block(const Observation& obs) {
    if (obs.gossip.empty()) return "    - There is no gossip yet.";
    std::string out;
    for (const auto& g : obs.gossip) out += "    - " + g + "\n";
    out.pop_back();
    return out;
}

inline std::string holding_blocks(const Observation& obs, bool with_prices) {
    if (obs.holdings.empty()) return "    - You are not holding any stocks.";
    std::string out;
    for (const auto& h : obs.holdings) {
        out += "    - " + h.ticker + ":\n";
        out += "        - You have held " + std::to_string(h.qty) + " shares of this stock\n";
        out += "        - the total portfolio value is " + fmt_fixed(h.value) +
               " the total capital gain is " + fmt_fixed(std::abs(h.gain_pct)) + "% " +
               (h.gain_pct >= 0.0 ? "PROFIT" : "LOSS") + "\n";
        if (with_prices) {
            out += "        - The prices in the past " + std::to_string(h.closes.size()) +
                   " days are: prices: " + fmt_price_list(h.closes) + "\n";
            out += "        - current price change: " + fmt_signed_pct(h.change_pct) +
                   ", current price: " + fmt_fixed(h.price_curr) +
                   ", cost price: " + fmt_fixed(h.cost_price) + "\n";
        }
    }
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

inline std::string strategy_block(const Observation& obs) {
    return obs.strategy_text.empty() ? "try to maximize profit." : obs.strategy_text;
}

} // namespace promptdetail

// Renders the analysis-stage request. Textual prompts carry the numeric
// price lists and no images; visual prompts attach the charts and omit the
// numeric lists; combined carries both.
inline CompletionRequest build_analysis_prompt(const Observation& obs, Modality modality,
                                               const std::vector<std::string>& chart_paths,
                                               const PromptLibrary& lib = {},
                                               const std::string& model = "stub") {
    const bool wants_charts = modality != Modality::textual;
    if (wants_charts) {
        if (chart_paths.empty())
            throw validation_error("build_analysis_prompt: visual modality requires chart images");
        for (const auto& p : chart_paths)
            if (!std::filesystem::exists(p))
                throw lookup_error("build_analysis_prompt: missing chart file: " + p);
    }

    std::map<std::string, std::string> values = {
        {"stock_information", modality == Modality::visual ? promptdetail::stock_blocks_visual(obs)
                                                           : promptdetail::stock_blocks_text(obs)},
        {"market_index_change", fmt_fixed(obs.market_index_change_pct)},
        {"gossip", promptdetail::gossip_block(obs)},
        {"portfolio_balance", fmt_fixed(obs.portfolio_balance)},
        {"existing_investments", promptdetail::holding_blocks(obs, modality != Modality::visual)},
        {"investment_strategy", promptdetail::strategy_block(obs)},
        {"task_visual_bullet",
         wants_charts ? std::string("    - The provided stock information visualizations.\n") : ""},
    };

    CompletionRequest req;
    req.model = model;
    req.user_parts.push_back(UserPart::text(render_template(lib.analysis, values)));
    if (wants_charts)
        for (const auto& p : chart_paths) req.user_parts.push_back(UserPart::image(p));
    return req;
}

inline CompletionRequest build_decision_prompt(const Observation& obs,
                                               const std::vector<std::string>& analysis_findings,
                                               const std::string& short_term_memory_text,
                                               const PromptLibrary& lib = {},
                                               const std::string& model = "stub") {
    std::string findings;
    for (const auto& f : analysis_findings) findings += "    - " + f + "\n";
    if (findings.empty()) findings = "    - No analysis available.\n";
    findings.pop_back();

    std::map<std::string, std::string> values = {
        {"analysis_results", findings},
        {"short_term_memory",
         short_term_memory_text.empty() ? "    - No trades yet today." : short_term_memory_text},
        {"stock_information", promptdetail::stock_blocks_text(obs)},
        {"portfolio_balance", fmt_fixed(obs.portfolio_balance)},
        {"existing_investments", promptdetail::holding_blocks(obs, true)},
        {"investment_strategy", promptdetail::strategy_block(obs)},
    };

    CompletionRequest req;
    req.model = model;
    req.user_parts.push_back(UserPart::text(render_template(lib.decision, values)));
    return req;
}

inline CompletionRequest build_gossip_prompt(const std::vector<std::string>& prior_findings,
                                             const PromptLibrary& lib = {},
                                             const std::string& model = "stub") {
    std::string findings;
    for (const auto& f : prior_findings) findings += "    - " + f + "\n";
    if (findings.empty()) findings = "    - No prior analysis available.\n";
    findings.pop_back();

    CompletionRequest req;
    req.model = model;
    req.user_parts.push_back(
        UserPart::text(render_template(lib.gossip, {{"analysis_results", findings}})));
    return req;
}

inline CompletionRequest build_evaluation_prompt(const std::string& short_term_memory_text,
                                                 const std::string& strategy_text,
                                                 double day_return_pct, const PromptLibrary& lib = {},
                                                 const std::string& model = "stub") {
    CompletionRequest req;
    req.model = model;
    req.user_parts.push_back(UserPart::text(render_template(
        lib.evaluation,
        {{"short_term_memory",
          short_term_memory_text.empty() ? "    - No trades today." : short_term_memory_text},
         {"investment_strategy", strategy_text.empty() ? "try to maximize profit." : strategy_text},
         {"day_return_pct", fmt_fixed(day_return_pct, 4)}})));
    return req;
}

inline CompletionRequest build_reflection_prompt(const std::string& short_term_memory_text,
                                                 const std::string& evaluation_text,
                                                 const std::string& strategy_text,
                                                 const std::vector<std::string>& top_strategies,
                                                 const std::vector<std::string>& bottom_strategies,
                                                 const PromptLibrary& lib = {},
                                                 const std::string& model = "stub") {
    auto bullets = [](const std::vector<std::string>& items) {
        if (items.empty()) return std::string("    - (none yet)");
        std::string out;
        for (const auto& s : items) out += "    - " + s + "\n";
        out.pop_back();
        return out;
    };
    CompletionRequest req;
    req.model = model;
    req.user_parts.push_back(UserPart::text(render_template(
        lib.reflection,
        {{"short_term_memory",
          short_term_memory_text.empty() ? "    - No trades today." : short_term_memory_text},
         {"evaluation", evaluation_text.empty() ? "(no evaluation)" : evaluation_text},
         {"investment_strategy", strategy_text.empty() ? "try to maximize profit." : strategy_text},
         {"top_strategies", bullets(top_strategies)},
         {"bottom_strategies", bullets(bottom_strategies)}})));
    return req;
}

} // namespace arena
