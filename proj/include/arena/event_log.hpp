#pragma once

// Append-only JSONL event log: one header line echoing the run config, one
// object per event (trade, chat, gossip_fetch, dividend, fee, strategy,
// roll_day, metric), and a final state snapshot that replay verifies against.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/config.hpp"
#include "arena/market.hpp"

namespace arena {

inline constexpr const char* event_log_version = "1";

struct replay_error : std::runtime_error {
    std::size_t record_index;
    replay_error(std::size_t index, const std::string& what_)
        : std::runtime_error("record " + std::to_string(index) + ": " + what_), record_index(index) {}
};

class EventLog {
public:
    EventLog() = default;

    // Opens the sink file (optional) and writes the header line.
    void start(const RunConfig& cfg, const std::string& path = "") {
        if (!path.empty()) {
            file_.open(path, std::ios::trunc);
            if (!file_) throw lookup_error("cannot open event log for writing: " + path);
        }
        ojson header;
        header["type"] = "header";
        header["version"] = event_log_version;
        header["config"] = to_json(cfg);
        append(std::move(header));
    }

    void append(ojson event) {
        if (file_.is_open()) {
            file_ << event.dump() << "\n";
            file_.flush();
        }
        records_.push_back(std::move(event));
    }

    void trade(const TradeRecord& rec) {
        ojson e;
        e["type"] = "trade";
        e["date"] = rec.order.date;
        e["iter"] = rec.order.iter;
        e["agent_id"] = rec.order.agent_id;
        e["op"] = to_string(rec.order.op);
        e["ticker"] = rec.order.ticker;
        e["qty"] = rec.order.qty;
        e["price_deal"] = rec.order.price_deal;
        e["executed_price"] = rec.executed_price;
        e["accepted"] = rec.accepted;
        e["reason"] = to_string(rec.reject_reason);
        e["price_after"] = rec.price_after;
        append(std::move(e));
    }

    void cash_flow(const CashFlow& flow) {
        ojson e;
        e["type"] = flow.kind == CashFlow::Kind::dividend ? "dividend" : "fee";
        e["date"] = flow.date;
        e["agent_id"] = flow.agent_id;
        e["amount"] = flow.amount;
        append(std::move(e));
    }

    const std::vector<ojson>& records() const { return records_; }

private:
    std::ofstream file_;
    std::vector<ojson> records_;
};

inline std::vector<ojson> read_event_log(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw lookup_error("cannot open event log: " + path);
    std::vector<ojson> records;
    std::string line;
    std::size_t n = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        ojson j = ojson::parse(line, nullptr, false);
        if (j.is_discarded()) throw replay_error(n, "corrupt JSONL record");
        records.push_back(std::move(j));
        ++n;
    }
    return records;
}

// Full-precision state snapshot; doubles survive the JSON round trip exactly.
inline ojson snapshot_state(const Market& market) {
    ojson snap;
    snap["type"] = "snapshot";
    snap["stocks"] = ojson::array();
    for (const auto& s : market.stocks)
        snap["stocks"].push_back({{"ticker", s.ticker},
                                  {"price_curr", s.price_curr},
                                  {"day_ref_price", s.day_ref_price},
                                  {"qty_total", s.qty_total},
                                  {"history", s.close_history}});
    snap["accounts"] = ojson::array();
    for (const auto& a : market.accounts) {
        ojson holdings = ojson::object();
        for (const auto& [ticker, h] : a.holdings)
            holdings[ticker] = {{"qty", h.qty}, {"cost_price", h.cost_price}};
        snap["accounts"].push_back({{"agent_id", a.agent_id}, {"cash", a.cash}, {"holdings", holdings}});
    }
    snap["ledger"] = {{"initial_cash", market.ledger.initial_cash},
                      {"buy_cost", market.ledger.buy_cost},
                      {"sell_proceeds", market.ledger.sell_proceeds},
                      {"dividends", market.ledger.dividends},
                      {"fees", market.ledger.fees}};
    return snap;
}

} // namespace arena
