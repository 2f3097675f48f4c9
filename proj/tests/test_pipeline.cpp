#include <catch2/catch.hpp>

#include <filesystem>

#include "arena/charts.hpp"
#include "arena/pipeline.hpp"
#include "arena/stub_backend.hpp"
#include "helpers.hpp"

using namespace arena;
using testutil::CapturingBackend;
using testutil::Rng;

namespace {

// Observation shaped like the combined-prompt fixture: three tickers with
// ten trailing closes, two holdings, one gossip item.
Observation fixture_observation() {
    Observation obs;
    obs.date = 9;
    obs.window = 10;
    obs.market_index_change_pct = 0.58;
    obs.gossip = {"Exciting developments are stirring, with whispers of a merger between the "
                  "companies behind two listed stocks."};

    obs.tickers.push_back({"A",
                           {437.80, 459.44, 465.25, 490.38, 501.034, 511.65, 511.72, 511.79, 511.78,
                            511.79},
                           22.0, 511.79, 511.79, 511.79, 511.79, 0.0});
    obs.tickers.push_back({"B",
                           {460.75, 465.80, 493.27, 502.06, 502.49, 497.32, 486.28, 468.01, 480.61,
                            480.61},
                           23.0, 480.61, 480.61, 480.61, 480.61, 0.0});
    obs.tickers.push_back({"C",
                           {455.90, 440.532, 424.91, 419.75, 420.48, 421.31, 420.12, 421.09, 435.33,
                            435.33},
                           25.0, 435.33, 435.33, 435.33, 435.33, 0.0});

    HoldingView b;
    b.ticker = "B";
    b.qty = 162;
    b.cost_price = 455.8;
    b.price_curr = 480.61;
    b.value = 162 * 480.61;
    b.gain_pct = (480.61 - 455.8) / 455.8 * 100.0;
    b.closes = obs.tickers[1].closes;
    obs.holdings.push_back(b);

    HoldingView a;
    a.ticker = "A";
    a.qty = 130;
    a.cost_price = 468.98;
    a.price_curr = 511.79;
    a.value = 130 * 511.79;
    a.gain_pct = (511.79 - 468.98) / 468.98 * 100.0;
    a.closes = obs.tickers[0].closes;
    obs.holdings.push_back(a);

    obs.portfolio_balance = 162 * 480.61 + 130 * 511.79;
    obs.strategy_text = "try to maximize profit.";
    return obs;
}

GatewayConfig fast_config() {
    GatewayConfig cfg;
    cfg.backoff_base_ms = 0;
    return cfg;
}

std::vector<std::string> fixture_charts() {
    const auto dir = std::filesystem::temp_directory_path() / "pipeline_charts";
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    ChartSpec spec;
    for (const char* t : {"A", "B", "C"}) {
        spec.title = std::string("Stock ") + t + " Price";
        const std::string p = (dir / (std::string(t) + "_line.png")).string();
        render_price_line({100, 101, 102, 101, 103}, spec, p);
        paths.push_back(p);
    }
    return paths;
}

} // namespace

TEST_CASE("prompt fidelity: text-only prompt carries every section in order") {
    const CompletionRequest req = build_analysis_prompt(fixture_observation(), Modality::textual, {});
    const std::string text = req.user_text();

    const char* sections[] = {"Instructions:",      "Stock information:",  "Market information:",
                              "Gossip from other people:", "Existing Investments:",
                              "Investment strategy:",      "Task:"};
    std::size_t last = 0;
    for (const char* section : sections) {
        const auto pos = text.find(section);
        INFO("section: " << section);
        REQUIRE(pos != std::string::npos);
        CHECK(pos >= last);
        last = pos;
    }

    // three per-ticker price arrays and zero image parts
    CHECK(req.image_count() == 0);
    std::size_t arrays = 0, pos = 0;
    while ((pos = text.find("The closing prices in the past", pos)) != std::string::npos) {
        ++arrays;
        ++pos;
    }
    CHECK(arrays == 3);
    CHECK(text.find("Current market index change: 0.58%") != std::string::npos);
    CHECK(text.find("You have held 162 shares") != std::string::npos);
    CHECK(text.find("cost price: 455.80") != std::string::npos);
}

TEST_CASE("prompt fidelity: visual prompt has charts and no raw price arrays") {
    const auto charts = fixture_charts();
    const CompletionRequest req =
        build_analysis_prompt(fixture_observation(), Modality::visual, charts);
    const std::string text = req.user_text();

    CHECK(req.image_count() >= 3);
    CHECK(text.find("The closing prices in the past") == std::string::npos);
    CHECK(text.find("prices: [") == std::string::npos);
    CHECK(text.find("The provided stock information visualizations.") != std::string::npos);

    const CompletionRequest combined =
        build_analysis_prompt(fixture_observation(), Modality::combined, charts);
    CHECK(combined.image_count() >= 3);
    CHECK(combined.user_text().find("The closing prices in the past") != std::string::npos);
}

TEST_CASE("prompt fidelity: byte-identical across calls, missing charts error") {
    const Observation obs = fixture_observation();
    const auto p1 = build_analysis_prompt(obs, Modality::textual, {});
    const auto p2 = build_analysis_prompt(obs, Modality::textual, {});
    CHECK(p1.user_text() == p2.user_text());

    CHECK_THROWS_AS(build_analysis_prompt(obs, Modality::visual, {}), validation_error);
    CHECK_THROWS_AS(build_analysis_prompt(obs, Modality::visual, {"/no/such/chart.png"}),
                    lookup_error);
}

TEST_CASE("analyze: normalizes to exactly three findings") {
    const Observation obs = fixture_observation();
    const GatewayConfig cfg = fast_config();

    SECTION("three findings pass through") {
        CapturingBackend backend(
            {R"({"output": "The analysis results: - first\n- second\n- third"})"});
        const AnalysisReport rep = analyze(obs, Modality::textual, {}, backend, cfg, "Amy");
        REQUIRE(rep.results.size() == 3);
        CHECK(rep.results[0] == "first");
        CHECK(rep.results[2] == "third");
    }
    SECTION("five findings truncate to the first three") {
        CapturingBackend backend(
            {R"({"output": "The analysis results: - a\n- b\n- c\n- d\n- e"})"});
        const AnalysisReport rep = analyze(obs, Modality::textual, {}, backend, cfg, "Amy");
        REQUIRE(rep.results.size() == 3);
        CHECK(rep.results == std::vector<std::string>{"a", "b", "c"});
    }
    SECTION("fewer findings pad with a placeholder") {
        CapturingBackend backend({R"({"output": "The analysis results: - only one"})"});
        const AnalysisReport rep = analyze(obs, Modality::textual, {}, backend, cfg, "Amy");
        REQUIRE(rep.results.size() == 3);
        CHECK(rep.results[0] == "only one");
        CHECK(rep.results[1] == "no additional finding");
    }
    SECTION("garbage output yields the empty sentinel after repairs") {
        CapturingBackend backend({"utter nonsense", "still nonsense", "and again"});
        const AnalysisReport rep = analyze(obs, Modality::textual, {}, backend, cfg, "Amy");
        CHECK(rep.failed());
        CHECK(backend.prompts.size() == 3);  // two repair reprompts
        CHECK(backend.prompts[1].find("could not be parsed") != std::string::npos);
    }
}

TEST_CASE("decide: maps order payloads and falls back to hold") {
    const Observation obs = fixture_observation();
    const GatewayConfig cfg = fast_config();
    AnalysisReport report;
    report.agent_id = "Amy";
    report.date = obs.date;
    report.results = {"f1", "f2", "f3"};

    SECTION("buy payload maps to an order") {
        CapturingBackend backend({R"({"op": "buy", "ticker": "A", "qty": 10, "price": 511.79})"});
        const Order order = decide(obs, report, "strategy", "", backend, cfg, 1);
        CHECK(order.op == OrderOp::buy);
        CHECK(order.ticker == "A");
        CHECK(order.qty == 10);
        CHECK(order.price_deal == Approx(511.79));
        CHECK(order.iter == 1);
    }
    SECTION("sell of an unheld ticker passes through untouched") {
        CapturingBackend backend({R"({"op": "sell", "ticker": "C", "qty": 5, "price": 435.33})"});
        const Order order = decide(obs, report, "strategy", "", backend, cfg, 0);
        CHECK(order.op == OrderOp::sell);
        CHECK(order.ticker == "C");  // market rejects downstream, not the pipeline
    }
    SECTION("parse failure holds") {
        CapturingBackend backend({"not json", "still not", "nope"});
        CHECK(decide(obs, report, "s", "", backend, cfg, 0).op == OrderOp::hold);
    }
    SECTION("empty-report sentinel holds without an LLM call") {
        CapturingBackend backend({R"({"op":"buy","ticker":"A","qty":1,"price":1})"});
        AnalysisReport sentinel;
        sentinel.agent_id = "Amy";
        CHECK(decide(obs, sentinel, "s", "", backend, cfg, 0).op == OrderOp::hold);
        CHECK(backend.prompts.empty());
    }
}

TEST_CASE("validate_action: pinned verdicts") {
    std::vector<StockState> stocks = {testutil::make_stock("A", 100.0, 1000)};
    MarketConfig cfg;
    auto account = testutil::make_account("p", 2000.0);

    Order affordable{"p", OrderOp::buy, "A", 10, 100.0, 0, 0};
    CHECK(validate_action(affordable, account, stocks, cfg).ok);

    Order too_big{"p", OrderOp::buy, "A", 41, 100.0, 0, 0};  // ~4100 > 2000
    const auto rejected = validate_action(too_big, account, stocks, cfg);
    CHECK_FALSE(rejected.ok);
    CHECK(rejected.reason == RejectReason::insufficient_cash);

    Order unknown{"p", OrderOp::buy, "ZZ", 1, 10.0, 0, 0};
    CHECK(validate_action(unknown, account, stocks, cfg).reason == RejectReason::unknown_ticker);

    Order zero_qty{"p", OrderOp::buy, "A", 0, 10.0, 0, 0};
    CHECK(validate_action(zero_qty, account, stocks, cfg).reason == RejectReason::invalid_order);
}

TEST_CASE("validate_action agrees with execute_order on random orders") {
    Rng rng(2718);
    for (int trial = 0; trial < 1000; ++trial) {
        StockState stock = testutil::make_stock("A", rng.uniform(5.0, 500.0), rng.uniform_int(100, 100000));
        stock.day_ref_price = stock.price_curr * rng.uniform(0.95, 1.05);
        AgentAccount account = testutil::make_account("p", rng.uniform(0.0, 20000.0));
        if (rng.chance(0.6)) account.holdings["A"] = {rng.uniform_int(1, 60), rng.uniform(5.0, 500.0)};

        MarketConfig cfg;
        cfg.allow_full_liquidation = rng.chance(0.3);

        Order order;
        order.agent_id = "p";
        order.ticker = "A";
        const int kind = static_cast<int>(rng.uniform_int(0, 2));
        order.op = kind == 0 ? OrderOp::buy : (kind == 1 ? OrderOp::sell : OrderOp::hold);
        if (order.op != OrderOp::hold) {
            order.qty = rng.uniform_int(0, 80);  // 0 included: invalid order path
            order.price_deal = rng.chance(0.9) ? stock.price_curr * rng.uniform(0.8, 1.2) : 0.0;
        }

        const ActionValidation verdict = validate_action(order, account, {stock}, cfg);
        AgentAccount acct_copy = account;
        StockState stock_copy = stock;
        const TradeRecord rec = execute_order(order, acct_copy, stock_copy, cfg);
        INFO("op=" << to_string(order.op) << " qty=" << order.qty << " deal=" << order.price_deal);
        CHECK(verdict.ok == rec.accepted);
        if (!verdict.ok) CHECK(verdict.reason == rec.reject_reason);
    }
}
