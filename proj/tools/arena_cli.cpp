// Command-line surface: arena runs, historical backtests, the window
// ablation harness, log replay and reporting.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include "arena/arena.hpp"
#include "arena/backtest.hpp"
#include "arena/http_backend.hpp"
#include "arena/report.hpp"

namespace {

using namespace arena;

// Intersects per-ticker series on common dates so every ticker has one bar
// per trading day.
BarsByTicker align_by_date(const BarsByTicker& raw) {
    if (raw.empty()) return raw;
    std::set<std::string> common;
    bool first = true;
    for (const auto& [ticker, series] : raw) {
        std::set<std::string> dates;
        for (const auto& bar : series) dates.insert(bar.date);
        if (first) {
            common = std::move(dates);
            first = false;
        } else {
            std::set<std::string> keep;
            for (const auto& d : common)
                if (dates.count(d)) keep.insert(d);
            common = std::move(keep);
        }
    }
    BarsByTicker aligned;
    for (const auto& [ticker, series] : raw) {
        auto& out = aligned[ticker];
        for (const auto& bar : series)
            if (common.count(bar.date)) out.push_back(bar);
    }
    return aligned;
}

BarsByTicker load_data_dir(const RunConfig& cfg, const std::string& data_dir) {
    BarsByTicker bars;
    if (!cfg.stocks.empty()) {
        for (const auto& s : cfg.stocks) {
            const auto res = load_ohlcv_csv(data_dir + "/" + s.ticker + ".csv");
            if (res.sorted_on_load)
                std::fprintf(stderr, "warning: %s.csv had unsorted dates; sorted on load\n",
                             s.ticker.c_str());
            bars[s.ticker] = res.bars;
        }
    } else {
        for (const auto& entry : std::filesystem::directory_iterator(data_dir)) {
            if (entry.path().extension() != ".csv") continue;
            const auto res = load_ohlcv_csv(entry.path().string());
            if (res.sorted_on_load)
                std::fprintf(stderr, "warning: %s had unsorted dates; sorted on load\n",
                             entry.path().filename().c_str());
            bars[entry.path().stem().string()] = res.bars;
        }
    }
    if (bars.empty()) throw validation_error("no CSV data found in " + data_dir);
    return align_by_date(bars);
}

std::shared_ptr<Backend> backend_for(const AgentSpec& spec, const RunConfig& cfg) {
    if (spec.backend == AgentBackend::stub)
        return std::make_shared<ProceduralStubBackend>(cfg.seed ^ fnv1a(spec.name));
    GatewayConfig gw = GatewayConfig::from_env();
    if (gw.base_url.empty())
        throw validation_error("agent " + spec.name + " uses the llm backend but ARENA_LLM_BASE_URL is unset");
    return std::make_shared<HttpBackend>(gw);
}

std::unique_ptr<Trader> trader_for(const AgentSpec& spec, const RunConfig& cfg, int iters) {
    if (spec.backend == AgentBackend::rule)
        return std::make_unique<RuleTrader>(spec.strategy, spec.params, true);
    GatewayConfig gw = GatewayConfig::from_env();
    gw.temperature = cfg.temperature;
    const PromptLibrary lib =
        cfg.prompt_dir.empty() ? PromptLibrary{} : PromptLibrary::load_dir(cfg.prompt_dir);

    ChartProvider charts;
    if (spec.modality != Modality::textual) {
        const std::string dir = "backtest_out/charts/" + spec.name;
        charts = [dir](const Observation& obs, const std::string&) {
            std::vector<std::string> paths;
            const std::string day_dir = dir + "/" + std::to_string(obs.date);
            std::filesystem::create_directories(day_dir);
            for (const auto& t : obs.tickers) {
                if (t.closes.size() < 2) continue;
                ChartSpec cs;
                cs.title = "Stock " + t.ticker + " Price";
                const std::string path = day_dir + "/" + t.ticker + "_line.png";
                render_price_line(t.closes, cs, path);
                paths.push_back(path);
            }
            return paths;
        };
    }
    return std::make_unique<LlmTrader>(spec.name, backend_for(spec, cfg), gw, spec.modality,
                                       spec.reflection, iters, lib, std::move(charts));
}

int cmd_arena_run(const std::string& config_path, const std::string& out_dir, bool trace_llm) {
    RunConfig cfg = load_config(config_path);
    BackendFactory factory = [&](const AgentSpec& spec) { return backend_for(spec, cfg); };
    const std::string trace = trace_llm ? out_dir + "/llm_trace.jsonl" : "";
    if (trace_llm) std::filesystem::create_directories(out_dir);
    const ArenaResult result = run_arena(cfg, out_dir, factory, trace);
    std::printf("arena run complete: %d days, %zu agents, %zu events\n", cfg.days,
                cfg.agents.size(), result.events.size());
    std::printf("event log: %s/events.jsonl\n", out_dir.c_str());
    const RunReport rep = report_from_log(result.events);
    std::printf("%s", format_report_table(rep).c_str());
    return 0;
}

int cmd_backtest_run(const std::string& config_path, const std::string& data_dir,
                     const std::string& json_out, const std::string& plots_dir) {
    RunConfig cfg = load_config(config_path);
    const std::string dir = data_dir.empty() ? cfg.data_path : data_dir;
    if (dir.empty()) throw validation_error("no data directory: pass --data or set data_path");
    const BarsByTicker bars = load_data_dir(cfg, dir);
    BacktestOptions opts;

    ojson out = ojson::array();
    std::vector<BacktestReport> reports;
    std::printf("Agent        Window   TR %%     Mean %%   Std %%    WR %%     SR\n");
    std::printf("------------ -------- -------- -------- -------- -------- --------\n");
    for (const auto& spec : cfg.agents) {
        opts.capital = spec.capital;
        auto trader = trader_for(spec, cfg, cfg.iters);
        BacktestReport rep = run_backtest(bars, *trader, cfg.window, opts);
        rep.label = spec.name;
        std::printf("%-12s %-8d %8.2f %8.3f %8.3f %8.1f %8s\n", spec.name.c_str(), rep.window,
                    rep.tr_pct, rep.mean_pct, rep.std_pct, rep.wr_pct,
                    rep.sr_defined ? fmt_fixed(rep.sr, 3).c_str() : "undef");
        out.push_back({{"agent", spec.name},
                       {"window", rep.window},
                       {"tr_pct", rep.tr_pct},
                       {"mean_pct", rep.mean_pct},
                       {"std_pct", rep.std_pct},
                       {"wr_pct", rep.wr_pct},
                       {"sr", rep.sr_defined ? ojson(rep.sr) : ojson("undefined")},
                       {"config", rep.config_echo}});
        reports.push_back(std::move(rep));
    }
    if (!json_out.empty()) {
        std::ofstream f(json_out);
        f << out.dump(2) << "\n";
    }
    if (!plots_dir.empty()) {
        std::filesystem::create_directories(plots_dir);
        for (const auto& [ticker, series] : bars) {
            std::vector<Ohlc> ohlc;
            ohlc.reserve(series.size());
            for (const auto& bar : series) ohlc.push_back({bar.open, bar.high, bar.low, bar.close});
            ChartSpec spec;
            spec.kind = ChartKind::candlestick;
            spec.title = "Stock " + ticker + " Daily";
            render_candlestick(ohlc, spec, plots_dir + "/" + ticker + "_candlestick.png");
        }
        for (const auto& rep : reports) {
            if (rep.curve.wealth.size() < 2) continue;
            ChartSpec spec;
            spec.title = rep.label + " Equity";
            render_price_line(rep.curve.wealth, spec, plots_dir + "/" + rep.label + "_equity.png");
        }
        std::printf("plots written to %s\n", plots_dir.c_str());
    }
    return 0;
}

int cmd_ablate_windows(const std::string& config_path, const std::string& data_dir,
                       const std::vector<int>& windows) {
    RunConfig cfg = load_config(config_path);
    const std::string dir = data_dir.empty() ? cfg.data_path : data_dir;
    if (dir.empty()) throw validation_error("no data directory: pass --data or set data_path");
    const BarsByTicker bars = load_data_dir(cfg, dir);

    std::vector<std::pair<std::string, TraderFactory>> factories;
    for (const auto& spec : cfg.agents)
        factories.emplace_back(spec.name, [&cfg, &spec](int) { return trader_for(spec, cfg, cfg.iters); });

    BacktestOptions opts;
    const auto rows = window_ablation(bars, factories, windows, opts);
    std::printf("%s", format_ablation_table(rows).c_str());
    return 0;
}

int cmd_replay(const std::string& log_path) {
    const ReplayResult result = replay_file(log_path);
    std::printf("replayed %s: %zu agents, %zu stocks, snapshot %s\n", log_path.c_str(),
                result.market.accounts.size(), result.market.stocks.size(),
                result.snapshot_verified ? "verified" : "absent (truncated log)");
    std::printf("ledger drift: %.3e\n", result.market.ledger_drift());
    for (const auto& account : result.market.accounts)
        std::printf("  %-12s cash %.2f wealth %.2f\n", account.agent_id.c_str(), account.cash,
                    mark_to_market(account, result.market.stocks));
    return 0;
}

int cmd_report(const std::string& log_path, const std::string& plots_dir, const std::string& json_out) {
    const auto records = read_event_log(log_path);
    const RunReport rep = report_from_log(records);
    std::printf("%s", format_report_table(rep).c_str());
    if (!json_out.empty()) {
        std::ofstream f(json_out);
        f << report_to_json(rep).dump(2) << "\n";
    }
    if (!plots_dir.empty()) {
        std::filesystem::create_directories(plots_dir);
        const ReplayResult replayed = replay(records);
        for (const auto& [name, curve] : replayed.curves) {
            if (curve.wealth.size() < 2) continue;
            ChartSpec spec;
            spec.title = name + " Equity";
            render_price_line(curve.wealth, spec, plots_dir + "/" + name + "_equity.png");
        }
        for (const auto& stock : replayed.market.stocks) {
            if (stock.close_history.size() < 2) continue;
            ChartSpec spec;
            spec.title = "Stock " + stock.ticker + " Price";
            render_price_line(stock.close_history, spec, plots_dir + "/" + stock.ticker + "_price.png");
        }
        std::printf("plots written to %s\n", plots_dir.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agent trading arena: zero-sum multi-agent market simulator and backtester"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "arena_out", data_dir, log_path, plots_dir, json_out;
    std::vector<int> windows = {5, 10, 15, 20};
    bool trace_llm = false;

    auto* arena_cmd = app.add_subcommand("arena", "closed-loop arena simulation");
    auto* arena_run = arena_cmd->add_subcommand("run", "run the arena per a config file");
    arena_run->add_option("--config", config_path, "run config (JSON)")->required();
    arena_run->add_option("--out", out_dir, "output directory (events.jsonl, memory/, charts/)");
    arena_run->add_flag("--trace-llm", trace_llm, "log full LLM request/response pairs");

    auto* backtest_cmd = app.add_subcommand("backtest", "historical backtests on OHLCV CSVs");
    auto* backtest_run = backtest_cmd->add_subcommand("run", "backtest the configured agents");
    backtest_run->add_option("--config", config_path, "run config (JSON)")->required();
    backtest_run->add_option("--data", data_dir, "directory of {ticker}.csv files");
    backtest_run->add_option("--json", json_out, "write report JSON to this path");
    backtest_run->add_option("--plots", plots_dir, "directory for candlestick/equity PNGs");

    auto* ablate_cmd = app.add_subcommand("ablate", "ablation harnesses");
    auto* ablate_windows = ablate_cmd->add_subcommand("windows", "window-size ablation table");
    ablate_windows->add_option("--config", config_path, "run config (JSON)")->required();
    ablate_windows->add_option("--data", data_dir, "directory of {ticker}.csv files");
    ablate_windows->add_option("--windows", windows, "window sizes");

    auto* replay_cmd = app.add_subcommand("replay", "rebuild final state from an event log");
    replay_cmd->add_option("--log", log_path, "events.jsonl from an arena run")->required();

    auto* report_cmd = app.add_subcommand("report", "per-agent metric table from an event log");
    report_cmd->add_option("--log", log_path, "events.jsonl from an arena run")->required();
    report_cmd->add_option("--plots", plots_dir, "directory for equity/price PNGs");
    report_cmd->add_option("--json", json_out, "write report JSON to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (arena_run->parsed()) return cmd_arena_run(config_path, out_dir, trace_llm);
        if (backtest_run->parsed()) return cmd_backtest_run(config_path, data_dir, json_out, plots_dir);
        if (ablate_windows->parsed()) return cmd_ablate_windows(config_path, data_dir, windows);
        if (replay_cmd->parsed()) return cmd_replay(log_path);
        if (report_cmd->parsed()) return cmd_report(log_path, plots_dir, json_out);
        std::fprintf(stderr, "no subcommand given\n");
        return 1;
    } catch (const validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const lookup_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
}
