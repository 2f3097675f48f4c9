#pragma once

// Offline deterministic backend: answers every pipeline stage with replies
// derived from an FNV hash of (seed, prompt bytes). Decision replies are
// synthesized from the tickers, prices and holdings the prompt itself
// reports, so arena runs stay lively without any network.

#include <cmath>
#include <cstdlib>
#include <iterator>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/gateway.hpp"
#include "arena/prompts.hpp"

namespace arena {

class ProceduralStubBackend : public Backend {
public:
    explicit ProceduralStubBackend(std::uint64_t seed = 0) : seed_(mix64(seed ^ 0x9e3779b97f4a7c15ull)) {}

    std::string send(const CompletionRequest& req) override {
        const std::string prompt = req.user_text();
        const std::uint64_t h = fnv1a(prompt, seed_);
        if (prompt.find(markers::decision) != std::string::npos) return decision_reply(prompt, h);
        if (prompt.find(markers::analysis) != std::string::npos) return analysis_reply(prompt, h);
        if (prompt.find(markers::gossip) != std::string::npos) return gossip_reply(h);
        if (prompt.find(markers::evaluation) != std::string::npos) return evaluation_reply(prompt, h);
        if (prompt.find(markers::reflection) != std::string::npos) return reflection_reply(h);
        return R"({"output": "ok"})";
    }

private:
    struct PromptFacts {
        std::vector<std::pair<std::string, double>> stocks;    // ticker -> current price
        std::vector<std::pair<std::string, long long>> holds;  // ticker -> held shares
    };

    // Walks the rendered prompt: "- X:" bullets name the current block;
    // "Current price: <p>" (stock section) and "You have held <n> shares"
    // (holdings section) attach facts to it.
    static PromptFacts extract_facts(const std::string& prompt) {
        PromptFacts facts;
        std::string label;
        std::size_t start = 0;
        while (start <= prompt.size()) {
            const std::size_t end = prompt.find('\n', start);
            const std::string line =
                prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
            start = end == std::string::npos ? prompt.size() + 1 : end + 1;

            const std::size_t dash = line.find("- ");
            if (dash != std::string::npos && !line.empty() && line.back() == ':' &&
                line.find_first_not_of(' ') == dash) {
                const std::string name = line.substr(dash + 2, line.size() - dash - 3);
                if (!name.empty() && name.find(' ') == std::string::npos) label = name;
            }
            if (const auto p = line.find("Current price: "); p != std::string::npos && !label.empty())
                facts.stocks.emplace_back(label, std::strtod(line.c_str() + p + 15, nullptr));
            if (const auto p = line.find("You have held "); p != std::string::npos && !label.empty())
                facts.holds.emplace_back(label, std::strtoll(line.c_str() + p + 14, nullptr, 10));
        }
        return facts;
    }

    static double round2(double v) { return std::round(v * 100.0) / 100.0; }

    std::string decision_reply(const std::string& prompt, std::uint64_t h) const {
        const PromptFacts facts = extract_facts(prompt);
        const std::uint64_t roll = mix64(h) % 10;

        nlohmann::json out = {{"op", "hold"}, {"ticker", ""}, {"qty", 0}, {"price", 0.0}};
        if (roll < 4 && !facts.stocks.empty()) {
            const auto& [ticker, price] = facts.stocks[mix64(h + 1) % facts.stocks.size()];
            const long long qty = 1 + static_cast<long long>(mix64(h + 2) % 20);
            const double drift = (static_cast<double>(mix64(h + 3) % 9) - 4.0) / 1000.0;
            out = {{"op", "buy"}, {"ticker", ticker}, {"qty", qty}, {"price", round2(price * (1.0 + drift))}};
        } else if (roll < 7 && !facts.holds.empty()) {
            const auto& [ticker, held] = facts.holds[mix64(h + 1) % facts.holds.size()];
            const long long cap = held > 1 ? held - 1 : 1;
            const long long qty = 1 + static_cast<long long>(mix64(h + 2) % static_cast<std::uint64_t>(cap));
            double price = 0.0;
            for (const auto& [t, p] : facts.stocks)
                if (t == ticker) price = p;
            if (price <= 0.0 && !facts.stocks.empty()) price = facts.stocks.front().second;
            if (price > 0.0)
                out = {{"op", "sell"}, {"ticker", ticker}, {"qty", qty}, {"price", round2(price)}};
        }
        return out.dump();
    }

    std::string analysis_reply(const std::string& prompt, std::uint64_t h) const {
        static const char* shapes[] = {
            "momentum looks strong over the recent window",
            "the price is drifting back toward its recent mean",
            "volume of chatter suggests crowded positioning",
            "dividend yield makes holding attractive at this price",
            "recent highs look fragile and prone to a pullback",
        };
        const PromptFacts facts = extract_facts(prompt);
        auto pick_ticker = [&](std::uint64_t k) {
            return facts.stocks.empty() ? std::string("the market")
                                        : "Stock " + facts.stocks[k % facts.stocks.size()].first;
        };
        std::string body = "The analysis results: ";
        for (int i = 0; i < 3; ++i) {
            body += "- " + pick_ticker(mix64(h + 10 + i)) + ": " +
                    shapes[mix64(h + 20 + i) % std::size(shapes)] + "\n";
        }
        body.pop_back();
        return nlohmann::json{{"output", body}}.dump();
    }

    std::string gossip_reply(std::uint64_t h) const {
        static const char* rumors[] = {
            "Whispers of a merger are circulating; some traders expect a sharp move soon.",
            "An analyst note claims dividends may be raised next quarter.",
            "Several large holders are rumored to be quietly reducing positions.",
            "Chatter points to unusually strong demand building under the surface.",
            "A widely followed desk is said to be calling the recent rally overdone.",
        };
        return nlohmann::json{{"output", rumors[mix64(h) % std::size(rumors)]}}.dump();
    }

    std::string evaluation_reply(const std::string& prompt, std::uint64_t h) const {
        std::string change = "0.0000";
        if (const auto p = prompt.find("Wealth change today: "); p != std::string::npos) {
            const auto end = prompt.find('%', p);
            if (end != std::string::npos) change = prompt.substr(p + 21, end - p - 21);
        }
        static const char* verdicts[] = {
            "the entries were timed reasonably but exits gave back gains",
            "the strategy was followed but position sizes were too timid",
            "chasing late moves hurt; patience at entry would have helped",
            "holding through the dip paid off relative to trading around it",
        };
        return nlohmann::json{{"output", "Wealth changed by " + change + "% today; " +
                                             verdicts[mix64(h) % std::size(verdicts)] + "."}}
            .dump();
    }

    std::string reflection_reply(std::uint64_t h) const {
        static const char* plans[] = {
            "Buy weakness in the strongest dividend payer and exit into strength.",
            "Trade smaller and only on clear momentum; avoid fighting the trend.",
            "Hold the best performer, rotate out of laggards on any bounce.",
            "Fade extended moves back to the recent mean, take profits early.",
            "Accumulate gradually on down days and avoid selling into panic.",
        };
        return nlohmann::json{{"output", plans[mix64(h) % std::size(plans)]}}.dump();
    }

    std::uint64_t seed_;
};

} // namespace arena
