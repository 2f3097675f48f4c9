#pragma once

// The closed-loop arena: daily workflow over gossip, observations, intra-day
// decision rounds, dividends, wealth fees, reflection and day roll, with a
// JSONL event log supporting exact deterministic replay.

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "arena/charts.hpp"
#include "arena/chat_pool.hpp"
#include "arena/config.hpp"
#include "arena/event_log.hpp"
#include "arena/metrics.hpp"
#include "arena/stub_backend.hpp"
#include "arena/traders.hpp"

namespace arena {

inline Market setup_market(const RunConfig& cfg) {
    Market market;
    market.config = cfg.market;
    for (const auto& spec : cfg.stocks) {
        StockState s;
        s.ticker = spec.ticker;
        s.price_curr = spec.history.back();
        s.day_ref_price = spec.history.back();
        s.qty_total = spec.qty_total;
        s.dps = spec.dps;
        s.close_history = spec.history;
        s.begin_day();
        market.stocks.push_back(std::move(s));
    }
    for (const auto& spec : cfg.agents) {
        AgentAccount a;
        a.agent_id = spec.name;
        a.cash = spec.capital;
        a.profile = {spec.name, spec.duration_years, spec.profession};
        market.ledger.initial_cash += spec.capital;
        market.accounts.push_back(std::move(a));
    }
    return market;
}

inline std::vector<double> trailing_closes(const StockState& stock, int window) {
    const auto& h = stock.close_history;
    const std::size_t take = std::min<std::size_t>(h.size(), static_cast<std::size_t>(window));
    return {h.end() - static_cast<std::ptrdiff_t>(take), h.end()};
}

inline Observation build_observation(const Market& market, const AgentAccount& account, int date,
                                     int window, const std::vector<ChatMessage>& gossip,
                                     const std::string& strategy_text) {
    Observation obs;
    obs.date = date;
    obs.window = window;
    obs.strategy_text = strategy_text;

    double index_change = 0.0;
    for (const auto& s : market.stocks) {
        TickerView t;
        t.ticker = s.ticker;
        t.closes = trailing_closes(s, window);
        t.dps = s.dps;
        t.price_curr = s.price_curr;
        t.intraday_high = s.intraday_high;
        t.intraday_low = s.intraday_low;
        t.intraday_mean = s.intraday_mean();
        t.change_pct = s.day_change_pct();
        index_change += t.change_pct;
        obs.tickers.push_back(std::move(t));
    }
    if (!market.stocks.empty()) index_change /= static_cast<double>(market.stocks.size());
    obs.market_index_change_pct = index_change;

    for (const auto& m : gossip) obs.gossip.push_back(m.text);

    obs.portfolio_balance = mark_to_market(account, market.stocks);
    for (const auto& [ticker, holding] : account.holdings) {
        const StockState* s = market.find_stock(ticker);
        if (s == nullptr) continue;
        HoldingView h;
        h.ticker = ticker;
        h.qty = holding.qty;
        h.value = static_cast<double>(holding.qty) * s->price_curr;
        h.gain_pct = holding.cost_price > 0.0
                         ? (s->price_curr - holding.cost_price) / holding.cost_price * 100.0
                         : 0.0;
        h.cost_price = holding.cost_price;
        h.closes = trailing_closes(*s, window);
        h.price_curr = s->price_curr;
        h.change_pct = s->day_change_pct();
        obs.holdings.push_back(std::move(h));
    }
    return obs;
}

struct ArenaResult {
    Market market;
    std::vector<ojson> events;
    std::map<std::string, EquityCurve> curves;
    std::map<std::string, BacktestReport> reports;
};

namespace arenadetail {

inline std::vector<std::size_t> roster_order(std::size_t n, const RunConfig& cfg, int day, int iter) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    if (cfg.market.order_policy == AgentOrderPolicy::seeded_shuffle) {
        std::uint64_t state = mix64(cfg.seed ^ (static_cast<std::uint64_t>(day) << 32) ^
                                    static_cast<std::uint64_t>(iter) ^ 0xa5a5a5a5ull);
        for (std::size_t i = n; i > 1; --i) {
            state = mix64(state + i);
            std::swap(order[i - 1], order[state % i]);
        }
    }
    return order;
}

inline std::shared_ptr<Backend> default_backend(const AgentSpec& spec, const RunConfig& cfg) {
    if (spec.backend == AgentBackend::stub)
        return std::make_shared<ProceduralStubBackend>(cfg.seed ^ fnv1a(spec.name));
    throw validation_error("agent " + spec.name +
                           ": llm backend requires ARENA_LLM_BASE_URL (use the CLI) or an injected factory");
}

} // namespace arenadetail

// Runs the full arena per the daily workflow: (1) gossip posts, (2) gossip
// fetch + observations, (3) iters decision rounds in roster order with
// validation and execution, (4) dividends, (5) wealth fee, (6) evaluation and
// reflection, (7) day roll. Agent errors degrade to holds; the run never
// aborts mid-day. When out_dir is set, events.jsonl, per-agent memory files
// and charts land there.
inline ArenaResult run_arena(const RunConfig& cfg, const std::string& out_dir = "",
                             BackendFactory backend_factory = {}, const std::string& trace_path = "") {
    cfg.validate();
    if (cfg.mode != "arena") throw validation_error("run_arena: config mode is not 'arena'");

    ArenaResult result;
    result.market = setup_market(cfg);
    Market& market = result.market;

    const PromptLibrary lib =
        cfg.prompt_dir.empty() ? PromptLibrary{} : PromptLibrary::load_dir(cfg.prompt_dir);

    GatewayConfig gw = GatewayConfig::from_env();
    gw.trace_path = trace_path;
    gw.backoff_base_ms = 100;

    const std::string charts_dir = (out_dir.empty() ? std::string("arena_out") : out_dir) + "/charts";
    std::map<std::string, std::vector<TradeRecord>> trades_by_agent;

    ChartProvider chart_provider = [&](const Observation& obs, const std::string& agent_id) {
        std::vector<std::string> paths;
        const std::string day_dir = charts_dir + "/" + std::to_string(obs.date);
        std::filesystem::create_directories(day_dir);
        for (const auto& t : obs.tickers) {
            if (t.closes.size() < 2) continue;
            ChartSpec spec;
            spec.title = "Stock " + t.ticker + " Price";
            const std::string path = chart_path(charts_dir, obs.date, t.ticker, ChartKind::line);
            render_price_line(t.closes, spec, path);
            paths.push_back(path);
        }
        {
            std::vector<std::pair<std::string, long long>> holdings;
            for (const auto& h : obs.holdings) holdings.emplace_back(h.ticker, h.qty);
            ChartSpec spec;
            spec.kind = ChartKind::holdings_bar;
            spec.title = "Buy & Sell Assert";
            const std::string path =
                chart_path(charts_dir, obs.date, agent_id + "_holdings", ChartKind::holdings_bar);
            render_holdings_bar(holdings, spec, path);
            paths.push_back(path);
        }
        {
            ChartSpec spec;
            spec.kind = ChartKind::trade_scatter;
            spec.title = "Trading Record";
            const std::string path =
                chart_path(charts_dir, obs.date, agent_id + "_trades", ChartKind::trade_scatter);
            render_trade_scatter(trades_by_agent[agent_id], spec, path);
            paths.push_back(path);
        }
        return paths;
    };

    std::vector<std::unique_ptr<Trader>> traders;
    for (const auto& spec : cfg.agents) {
        if (spec.backend == AgentBackend::rule) {
            traders.push_back(
                std::make_unique<RuleTrader>(spec.strategy, spec.params, cfg.market.allow_full_liquidation));
        } else {
            std::shared_ptr<Backend> backend =
                backend_factory ? backend_factory(spec) : arenadetail::default_backend(spec, cfg);
            GatewayConfig agent_gw = gw;
            agent_gw.temperature = cfg.temperature;
            traders.push_back(std::make_unique<LlmTrader>(spec.name, std::move(backend), agent_gw,
                                                          spec.modality, spec.reflection, cfg.iters, lib,
                                                          chart_provider));
        }
    }

    EventLog log;
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    log.start(cfg, out_dir.empty() ? "" : out_dir + "/events.jsonl");

    ChatPool pool;
    for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
        EquityCurve curve;
        curve.dates.push_back(-1);
        curve.wealth.push_back(cfg.agents[i].capital);
        result.curves[cfg.agents[i].name] = std::move(curve);
    }

    for (int day = 0; day < cfg.days; ++day) {
        for (auto& s : market.stocks) s.begin_day();

        std::vector<double> wealth_open(market.accounts.size());
        for (std::size_t i = 0; i < market.accounts.size(); ++i)
            wealth_open[i] = mark_to_market(market.accounts[i], market.stocks);

        for (auto& trader : traders) trader->begin_day(day);

        // (1) Gossip generation and posting.
        if (cfg.chat.enabled) {
            if (day == 0) {
                for (const auto& text : cfg.chat.seed_gossip) {
                    ChatMessage msg{-1, "environment", text, 0};
                    pool.post(msg);
                    log.append({{"type", "chat"},
                                {"date", -1},
                                {"author", "environment"},
                                {"text", text},
                                {"visible_from", 0}});
                }
            }
            for (std::size_t i = 0; i < traders.size(); ++i) {
                const std::string text = traders[i]->make_gossip();
                if (text.empty()) continue;
                ChatMessage msg{day, cfg.agents[i].name, text, day + 1};
                pool.post(msg);
                log.append({{"type", "chat"},
                            {"date", day},
                            {"author", cfg.agents[i].name},
                            {"text", text},
                            {"visible_from", day + 1}});
            }
        }

        // (2) Fetch the visible gossip once per day.
        const std::vector<ChatMessage> gossip =
            cfg.chat.enabled ? pool.fetch(day, static_cast<std::size_t>(cfg.chat.limit))
                             : std::vector<ChatMessage>{};
        log.append({{"type", "gossip_fetch"}, {"date", day}, {"count", gossip.size()}});

        // (3) Intra-day decision rounds.
        for (int iter = 0; iter < cfg.iters; ++iter) {
            const auto roster = arenadetail::roster_order(traders.size(), cfg, day, iter);
            for (const std::size_t idx : roster) {
                AgentAccount& account = market.accounts[idx];
                const int eff_window = std::max(
                    cfg.window, static_cast<int>(traders[idx]->min_history()));
                const Observation obs = build_observation(market, account, day, eff_window, gossip,
                                                          traders[idx]->strategy_text());
                Order order;
                try {
                    order = traders[idx]->act(obs, account, iter);
                } catch (const std::exception&) {
                    order = Order{};  // any agent failure degrades to hold
                }
                order.agent_id = account.agent_id;
                order.date = day;
                order.iter = iter;

                TradeRecord rec;
                const ActionValidation verdict =
                    validate_action(order, account, market.stocks, market.config);
                if (order.op == OrderOp::hold) {
                    rec.order = order;
                    rec.accepted = true;
                } else if (verdict.ok) {
                    rec = market.submit(order);
                } else {
                    rec.order = order;
                    rec.accepted = false;
                    rec.reject_reason = verdict.reason;
                    const StockState* s = market.find_stock(order.ticker);
                    rec.price_after = s != nullptr ? s->price_curr : 0.0;
                }
                log.trade(rec);
                traders[idx]->on_trade(rec);
                if (rec.accepted && rec.order.op != OrderOp::hold)
                    trades_by_agent[account.agent_id].push_back(rec);
            }
        }

        // (4) Dividends, (5) wealth fee.
        for (const CashFlow& flow : pay_dividends(market.accounts, market.stocks, day, market.config)) {
            market.ledger.record(flow);
            CashFlow dated = flow;
            dated.date = day;
            log.cash_flow(dated);
        }
        for (const CashFlow& flow : charge_wealth_fee(market.accounts, market.stocks, market.config, day)) {
            market.ledger.record(flow);
            log.cash_flow(flow);
        }

        // (6) Evaluation and reflection.
        for (std::size_t i = 0; i < traders.size(); ++i) {
            const double wealth_close = mark_to_market(market.accounts[i], market.stocks);
            try {
                traders[i]->end_day(wealth_open[i], wealth_close);
            } catch (const std::exception&) {
            }
            const ojson ev = traders[i]->strategy_event();
            if (!ev.empty()) {
                ojson e = {{"type", "strategy"}, {"date", day}, {"agent_id", cfg.agents[i].name}};
                e.update(ev);
                log.append(std::move(e));
            }
        }

        // (7) Day roll.
        roll_day(market.stocks);
        {
            ojson closes = ojson::object();
            for (const auto& s : market.stocks) closes[s.ticker] = s.price_curr;
            log.append({{"type", "roll_day"}, {"date", day}, {"closes", closes}});
        }
        for (std::size_t i = 0; i < market.accounts.size(); ++i) {
            const double wealth = mark_to_market(market.accounts[i], market.stocks);
            market.accounts[i].wealth_history.push_back(wealth);
            auto& curve = result.curves[market.accounts[i].agent_id];
            curve.dates.push_back(day);
            curve.wealth.push_back(wealth);
        }

        if (!out_dir.empty()) {
            const std::string mem_dir = out_dir + "/memory";
            std::filesystem::create_directories(mem_dir);
            for (std::size_t i = 0; i < traders.size(); ++i) {
                auto* llm = dynamic_cast<LlmTrader*>(traders[i].get());
                if (llm == nullptr) continue;
                std::ofstream mem(mem_dir + "/" + cfg.agents[i].name + ".jsonl", std::ios::app);
                for (const auto& step : llm->short_term_memory().steps)
                    mem << ojson{{"date", step.date},
                                 {"iter", step.iter},
                                 {"input_digest", step.input_digest},
                                 {"output_digest", step.output_digest}}
                               .dump()
                        << "\n";
                if (!llm->library().entries.empty()) {
                    const auto& e = llm->library().entries.back();
                    if (e.date == day) {
                        std::ofstream libf(mem_dir + "/" + cfg.agents[i].name + "_library.jsonl",
                                           std::ios::app);
                        libf << ojson{{"date", e.date},
                                      {"text", e.text},
                                      {"score", e.score},
                                      {"evaluation", e.evaluation}}
                                    .dump()
                             << "\n";
                    }
                }
            }
        }
    }

    // Final metrics per agent.
    for (std::size_t i = 0; i < market.accounts.size(); ++i) {
        const auto& name = market.accounts[i].agent_id;
        BacktestReport rep = summarize_curve(result.curves[name], cfg.agents[i].capital);
        rep.label = name;
        rep.window = cfg.window;
        result.reports[name] = rep;
        log.append({{"type", "metric"},
                    {"agent_id", name},
                    {"tr_pct", rep.tr_pct},
                    {"mean_pct", rep.mean_pct},
                    {"std_pct", rep.std_pct},
                    {"wr_pct", rep.wr_pct},
                    {"sr", rep.sr},
                    {"sr_defined", rep.sr_defined}});
    }
    log.append(snapshot_state(market));
    result.events = log.records();
    return result;
}

struct ReplayResult {
    Market market;
    RunConfig config;
    std::map<std::string, EquityCurve> curves;
    bool snapshot_verified = false;
};

// Reconstructs final state by re-executing every committed order through the
// market and applying recorded dividend/fee amounts. Any divergence from the
// recorded execution or final snapshot throws replay_error with the record
// index. A truncated log yields the state as of truncation.
inline ReplayResult replay(const std::vector<ojson>& records) {
    if (records.empty() || records.front().value("type", "") != "header")
        throw replay_error(0, "missing header record");
    ReplayResult result;
    result.config = config_from_json(records.front().at("config"));
    result.market = setup_market(result.config);
    Market& market = result.market;

    for (const auto& spec : result.config.agents) {
        EquityCurve curve;
        curve.dates.push_back(-1);
        curve.wealth.push_back(spec.capital);
        result.curves[spec.name] = std::move(curve);
    }

    for (std::size_t i = 1; i < records.size(); ++i) {
        const ojson& r = records[i];
        const std::string type = r.value("type", "");
        try {
            if (type == "trade") {
                Order order;
                order.agent_id = r.at("agent_id").get<std::string>();
                order.op = order_op_from_string(r.at("op").get<std::string>());
                order.ticker = r.at("ticker").get<std::string>();
                order.qty = r.at("qty").get<long long>();
                order.price_deal = r.at("price_deal").get<double>();
                order.date = r.at("date").get<int>();
                order.iter = r.at("iter").get<int>();
                const bool accepted = r.at("accepted").get<bool>();
                if (order.op == OrderOp::hold) continue;
                if (accepted) {
                    const TradeRecord rec = market.submit(order);
                    if (!rec.accepted)
                        throw replay_error(i, "recorded trade no longer executes: " +
                                                  std::string(to_string(rec.reject_reason)));
                    if (rec.executed_price != r.at("executed_price").get<double>())
                        throw replay_error(i, "executed price diverges from record");
                } else {
                    const ActionValidation verdict =
                        validate_action(order, market.account(order.agent_id), market.stocks,
                                        market.config);
                    if (verdict.ok) throw replay_error(i, "recorded rejection now executes");
                }
            } else if (type == "dividend" || type == "fee") {
                CashFlow flow;
                flow.kind = type == "dividend" ? CashFlow::Kind::dividend : CashFlow::Kind::fee;
                flow.agent_id = r.at("agent_id").get<std::string>();
                flow.amount = r.at("amount").get<double>();
                flow.date = r.value("date", 0);
                market.account(flow.agent_id).cash += flow.amount;
                market.ledger.record(flow);
            } else if (type == "roll_day") {
                roll_day(market.stocks);
                for (const auto& [ticker, close] : r.at("closes").items())
                    if (market.stock(ticker).price_curr != close.get<double>())
                        throw replay_error(i, "close for " + ticker + " diverges from record");
                for (auto& s : market.stocks) s.begin_day();
                const int day = r.at("date").get<int>();
                for (auto& account : market.accounts) {
                    auto& curve = result.curves[account.agent_id];
                    curve.dates.push_back(day);
                    curve.wealth.push_back(mark_to_market(account, market.stocks));
                }
            } else if (type == "snapshot") {
                ojson live = snapshot_state(market);
                if (live != r) throw replay_error(i, "final state diverges from recorded snapshot");
                result.snapshot_verified = true;
            }
        } catch (const replay_error&) {
            throw;
        } catch (const std::exception& e) {
            throw replay_error(i, e.what());
        }
    }
    return result;
}

inline ReplayResult replay_file(const std::string& path) { return replay(read_event_log(path)); }

} // namespace arena
