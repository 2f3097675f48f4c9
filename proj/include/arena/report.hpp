#pragma once

// Per-agent performance report over a finished run log: TR/Mean/Std/WR/SR
// plus the average market trend and the gain relative to it.

#include <string>
#include <vector>

#include "arena/arena.hpp"
#include "arena/metrics.hpp"

namespace arena {

struct AgentReportRow {
    std::string agent_id;
    double avg_trend_pct = 0.0;
    double tr_pct = 0.0;
    double mean_pct = 0.0;
    double std_pct = 0.0;
    double wr_pct = 0.0;
    double sr = 0.0;
    bool sr_defined = false;
    double delta_pct = 0.0;  // TR minus average market trend
};

struct RunReport {
    double avg_trend_pct = 0.0;  // equal-weight average ticker return over the run
    std::vector<AgentReportRow> rows;
};

// Builds the report by replaying the log (single source of truth for state).
inline RunReport report_from_log(const std::vector<ojson>& records) {
    const ReplayResult rep = replay(records);

    RunReport out;
    double trend = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < rep.market.stocks.size(); ++i) {
        const auto& stock = rep.market.stocks[i];
        const double initial = rep.config.stocks[i].history.back();
        if (initial > 0.0) {
            trend += (stock.price_curr - initial) / initial * 100.0;
            ++counted;
        }
    }
    out.avg_trend_pct = counted > 0 ? trend / static_cast<double>(counted) : 0.0;

    for (const auto& spec : rep.config.agents) {
        const auto it = rep.curves.find(spec.name);
        if (it == rep.curves.end()) continue;
        const BacktestReport br = summarize_curve(it->second, spec.capital);
        AgentReportRow row;
        row.agent_id = spec.name;
        row.avg_trend_pct = out.avg_trend_pct;
        row.tr_pct = br.tr_pct;
        row.mean_pct = br.mean_pct;
        row.std_pct = br.std_pct;
        row.wr_pct = br.wr_pct;
        row.sr = br.sr;
        row.sr_defined = br.sr_defined;
        row.delta_pct = br.tr_pct - out.avg_trend_pct;
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline std::string format_report_table(const RunReport& report) {
    std::string out =
        "Agent        Avg.Trend  TR %     Mean %   Std %    WR %     SR       Delta %\n"
        "------------ ---------- -------- -------- -------- -------- -------- --------\n";
    char buf[200];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "%-12s %10.4f %8.2f %8.4f %8.4f %8.1f %8s %8.2f\n",
                      r.agent_id.c_str(), r.avg_trend_pct, r.tr_pct, r.mean_pct, r.std_pct, r.wr_pct,
                      r.sr_defined ? fmt_fixed(r.sr, 3).c_str() : "undef", r.delta_pct);
        out += buf;
    }
    return out;
}

inline ojson report_to_json(const RunReport& report) {
    ojson j;
    j["avg_trend_pct"] = report.avg_trend_pct;
    j["agents"] = ojson::array();
    for (const auto& r : report.rows)
        j["agents"].push_back({{"agent_id", r.agent_id},
                               {"tr_pct", r.tr_pct},
                               {"mean_pct", r.mean_pct},
                               {"std_pct", r.std_pct},
                               {"wr_pct", r.wr_pct},
                               {"sr", r.sr_defined ? ojson(r.sr) : ojson("undefined")},
                               {"delta_pct", r.delta_pct}});
    return j;
}

} // namespace arena
