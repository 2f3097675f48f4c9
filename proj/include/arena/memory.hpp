#pragma once

// Agent memory: the intra-day trajectory log (short-term), the end-of-day
// evaluation and scoring, the scored strategy library (long-term), and the
// top/bottom exemplar selection feeding reflection.

#include <algorithm>
#include <string>
#include <vector>

#include "arena/common.hpp"
#include "arena/gateway.hpp"
#include "arena/prompts.hpp"

namespace arena {

struct MemoryStep {
    int date = 0;
    int iter = 0;
    std::string input_digest;
    std::string output_digest;
};

// Key-information extractor over a prompt/response pair. Pulls the action
// fields out of decision outputs and truncates everything else.
struct Digester {
    std::size_t max_chars = 512;

    std::string squeeze(const std::string& text) const {
        std::string out;
        out.reserve(std::min(text.size(), max_chars));
        for (char c : text) {
            if (out.size() >= max_chars) break;
            out += (c == '\n' || c == '\r') ? ' ' : c;
        }
        return out;
    }

    MemoryStep operator()(int date, int iter, const std::string& input,
                          const std::string& output) const {
        MemoryStep step;
        step.date = date;
        step.iter = iter;

        // Input digest: the portfolio line when present, else the head.
        const auto bal = input.find("Your total portfolio balance is ");
        if (bal != std::string::npos) {
            const auto end = input.find('\n', bal);
            step.input_digest = squeeze(input.substr(bal, end == std::string::npos ? std::string::npos
                                                                                   : end - bal));
        } else {
            step.input_digest = squeeze(input);
        }

        // Output digest: structured action fields when the output carries an
        // order, else the truncated raw text.
        try {
            const auto j = parse_json_output(output);
            if (j.contains("op")) {
                std::string s = "op=" + j.value("op", "hold");
                if (j.contains("ticker") && j["ticker"].is_string())
                    s += " ticker=" + j["ticker"].get<std::string>();
                if (j.contains("qty")) s += " qty=" + j["qty"].dump();
                if (j.contains("price")) s += " price=" + j["price"].dump();
                step.output_digest = squeeze(s);
                return step;
            }
            if (j.contains("output") && j["output"].is_string()) {
                step.output_digest = squeeze(j["output"].get<std::string>());
                return step;
            }
        } catch (const parse_error&) {
        }
        step.output_digest = squeeze(output);
        return step;
    }
};

struct ShortTermMemory {
    int date = 0;
    int capacity = 0;  // T, the intra-day iteration budget
    std::vector<MemoryStep> steps;

    ShortTermMemory() = default;
    ShortTermMemory(int date_, int capacity_) : date(date_), capacity(capacity_) {}

    void record_step(const std::string& input, const std::string& output, const Digester& digest) {
        if (capacity > 0 && static_cast<int>(steps.size()) >= capacity)
            throw validation_error("short-term memory: iteration budget exceeded");
        steps.push_back(digest(date, static_cast<int>(steps.size()), input, output));
    }

    std::string to_text() const {
        std::string out;
        for (const auto& s : steps)
            out += "    - [iter " + std::to_string(s.iter) + "] " + s.input_digest + " => " +
                   s.output_digest + "\n";
        if (!out.empty()) out.pop_back();
        return out;
    }
};

struct StrategyEntry {
    int date = 0;
    std::string text;
    double score = 0.0;  // daily wealth return, percent
    std::string evaluation;
};

struct LongTermMemory {
    std::vector<StrategyEntry> entries;  // append-only, dates strictly increasing

    void append(StrategyEntry entry) {
        if (!entries.empty() && entry.date <= entries.back().date)
            throw validation_error("long-term memory: dates must be strictly increasing");
        entries.push_back(std::move(entry));
    }

    std::size_t size() const { return entries.size(); }
};

// Daily wealth return in percent; the strategy score.
inline double score_strategy(double wealth_open, double wealth_close) {
    if (wealth_open <= 0.0) throw validation_error("score_strategy: open wealth must be > 0");
    return (wealth_close - wealth_open) / wealth_open * 100.0;
}

struct ExemplarSelection {
    std::vector<StrategyEntry> top;
    std::vector<StrategyEntry> bottom;
};

// Top/bottom scored strategies, ties broken toward the most recent date.
// Sets are disjoint whenever the library holds at least 2 entries (balanced
// split when fewer than 10); a single entry serves as both.
inline ExemplarSelection select_exemplars(const LongTermMemory& library) {
    ExemplarSelection sel;
    const std::size_t n = library.entries.size();
    if (n == 0) return sel;
    if (n == 1) {
        sel.top = {library.entries.front()};
        sel.bottom = {library.entries.front()};
        return sel;
    }

    std::vector<StrategyEntry> sorted = library.entries;
    std::stable_sort(sorted.begin(), sorted.end(), [](const StrategyEntry& a, const StrategyEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.date > b.date;
    });

    const std::size_t top_n = std::min<std::size_t>(5, (n + 1) / 2);
    const std::size_t bottom_n = std::min<std::size_t>(5, n - top_n);
    sel.top.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(top_n));

    // Bottom set drawn from the remainder with its own recency-preferring
    // order, worst first; disjoint from the top by construction.
    std::vector<StrategyEntry> rest(sorted.begin() + static_cast<std::ptrdiff_t>(top_n), sorted.end());
    std::stable_sort(rest.begin(), rest.end(), [](const StrategyEntry& a, const StrategyEntry& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.date > b.date;
    });
    sel.bottom.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(bottom_n));
    return sel;
}

// End-of-day evaluation: prompts with the day's trajectory and strategy,
// stores the evaluation text and the numeric score on the entry. Gateway
// failure degrades to a deterministic numeric summary.
inline std::string evaluate_day(const ShortTermMemory& stm, StrategyEntry& entry, Backend& backend,
                                const GatewayConfig& cfg, double wealth_open, double wealth_close,
                                const PromptLibrary& lib = {}) {
    entry.score = score_strategy(wealth_open, wealth_close);

    std::string evaluation;
    try {
        const CompletionRequest req =
            build_evaluation_prompt(stm.to_text(), entry.text, entry.score, lib, cfg.model);
        const auto result = complete(backend, req, cfg);
        const auto parsed = parse_json_output(result.raw_text, {"output"});
        if (parsed["output"].is_string()) evaluation = parsed["output"].get<std::string>();
    } catch (const gateway_error&) {
    }
    if (evaluation.empty())
        evaluation = "Automatic summary: wealth changed by " + fmt_fixed(entry.score, 4) +
                     "% over " + std::to_string(stm.steps.size()) + " recorded steps.";
    entry.evaluation = evaluation;
    return evaluation;
}

// Reflection: archives today's completed entry in the library, prompts with
// the trajectory, evaluation and top/bottom exemplars, and returns the entry
// for the next day. Gateway failure carries today's strategy forward.
inline StrategyEntry reflect(const ShortTermMemory& stm, const StrategyEntry& today,
                             LongTermMemory& library, Backend& backend, const GatewayConfig& cfg,
                             const PromptLibrary& lib = {}) {
    library.append(today);
    const ExemplarSelection sel = select_exemplars(library);

    auto labelled = [](const std::vector<StrategyEntry>& entries) {
        std::vector<std::string> out;
        out.reserve(entries.size());
        for (const auto& e : entries)
            out.push_back("[day " + std::to_string(e.date) + ", " + fmt_fixed(e.score, 2) + "%] " + e.text);
        return out;
    };

    StrategyEntry next;
    next.date = today.date + 1;
    next.text = today.text;  // fallback: carry forward
    try {
        const CompletionRequest req =
            build_reflection_prompt(stm.to_text(), today.evaluation, today.text, labelled(sel.top),
                                    labelled(sel.bottom), lib, cfg.model);
        const auto result = complete(backend, req, cfg);
        const auto parsed = parse_json_output(result.raw_text, {"output"});
        if (parsed["output"].is_string() && !parsed["output"].get<std::string>().empty())
            next.text = parsed["output"].get<std::string>();
    } catch (const gateway_error&) {
    }
    return next;
}

} // namespace arena
