#include <catch2/catch.hpp>

#include "arena/strategies.hpp"
#include "helpers.hpp"

using namespace arena;
using testutil::Rng;

namespace {

// Independent long-double recurrences used as indicator oracles.
std::vector<long double> sma_oracle(const std::vector<double>& p, int w) {
    std::vector<long double> out;
    for (std::size_t i = w - 1; i < p.size(); ++i) {
        long double sum = 0.0L;
        for (std::size_t j = i + 1 - w; j <= i; ++j) sum += p[j];
        out.push_back(sum / w);
    }
    return out;
}

std::vector<long double> ema_oracle(const std::vector<double>& p, int span) {
    const long double alpha = 2.0L / (span + 1.0L);
    std::vector<long double> out;
    long double v = p[0];
    out.push_back(v);
    for (std::size_t i = 1; i < p.size(); ++i) {
        v = alpha * p[i] + (1.0L - alpha) * v;
        out.push_back(v);
    }
    return out;
}

std::vector<double> random_walk(Rng& rng, std::size_t n, double start = 100.0) {
    std::vector<double> p{start};
    while (p.size() < n) p.push_back(std::max(1.0, p.back() * rng.uniform(0.97, 1.03)));
    return p;
}

} // namespace

TEST_CASE("sma: pinned examples and errors") {
    CHECK(sma({1, 2, 3, 4, 5}, 3) == std::vector<double>{2, 3, 4});
    const auto flat = sma(std::vector<double>(10, 100.0), 5);
    for (double v : flat) CHECK(v == Approx(100.0));
    const auto table2 = sma({437.80, 459.44, 465.25}, 3);
    REQUIRE(table2.size() == 1);
    CHECK(table2[0] == Approx((437.80 + 459.44 + 465.25) / 3.0).epsilon(1e-13));
    CHECK_THROWS_AS(sma({1, 2}, 3), validation_error);
    CHECK_THROWS_AS(sma({1, 2, 3}, 0), validation_error);
}

TEST_CASE("sma: shift-equivariance and oracle agreement") {
    Rng rng(41);
    const auto prices = random_walk(rng, 200);
    const auto base = sma(prices, 20);

    std::vector<double> shifted = {50.0, 51.0, 52.0};
    shifted.insert(shifted.end(), prices.begin(), prices.end());
    const auto shifted_sma = sma(shifted, 20);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(base[i] == Approx(shifted_sma[i + 3]).epsilon(1e-12));

    const auto want = sma_oracle(prices, 20);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(std::abs(base[i] - static_cast<double>(want[i])) <= 1e-10);
}

TEST_CASE("ema: pinned examples and oracle agreement") {
    const auto flat = ema(std::vector<double>(10, 100.0), 12);
    for (double v : flat) CHECK(v == 100.0);  // exact fixed point

    const auto identity = ema({3.0, 1.0, 4.0, 1.0, 5.0}, 1);
    CHECK(identity == std::vector<double>{3.0, 1.0, 4.0, 1.0, 5.0});

    const auto two = ema({100.0, 110.0}, 3);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == 100.0);
    CHECK(two[1] == Approx(105.0).epsilon(1e-14));

    CHECK_THROWS_AS(ema({}, 3), validation_error);

    Rng rng(42);
    const auto prices = random_walk(rng, 200);
    const auto got = ema(prices, 26);
    const auto want = ema_oracle(prices, 26);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(std::abs(got[i] - static_cast<double>(want[i])) <= 1e-10);
}

TEST_CASE("macd: constant series is identically zero") {
    const auto r = macd(std::vector<double>(60, 250.0));
    for (double v : r.macd_line) CHECK(v == 0.0);
    for (double v : r.signal_line) CHECK(v == 0.0);
    for (double v : r.histogram) CHECK(v == 0.0);
}

TEST_CASE("macd: ramp response and crossover day match a brute-force scan") {
    std::vector<double> ramp;
    for (int i = 0; i < 120; ++i) ramp.push_back(100.0 + i);
    const auto r = macd(ramp);
    // fast EMA tracks a ramp closer than slow, so the line settles positive
    CHECK(r.macd_line.back() > 0.0);
    for (std::size_t i = 80; i < r.macd_line.size(); ++i) CHECK(r.macd_line[i] > 0.0);

    Rng rng(77);
    const auto prices = random_walk(rng, 200);
    const auto got = macd(prices);
    const auto fast = ema_oracle(prices, 12);
    const auto slow = ema_oracle(prices, 26);
    std::vector<double> line;
    for (std::size_t i = 0; i < prices.size(); ++i)
        line.push_back(static_cast<double>(fast[i] - slow[i]));
    const auto signal = ema_oracle(line, 9);

    int want_cross = -1, got_cross = -1;
    for (std::size_t i = 1; i < prices.size(); ++i) {
        if (want_cross < 0 && line[i - 1] <= static_cast<double>(signal[i - 1]) &&
            line[i] > static_cast<double>(signal[i]))
            want_cross = static_cast<int>(i);
        if (got_cross < 0 && got.macd_line[i - 1] <= got.signal_line[i - 1] &&
            got.macd_line[i] > got.signal_line[i])
            got_cross = static_cast<int>(i);
    }
    CHECK(got_cross == want_cross);

    CHECK_THROWS_AS(macd(std::vector<double>(10, 1.0)), validation_error);
}

TEST_CASE("zmr_signal: degenerate band, dip entry, holding-period exit") {
    StrategyParams params;
    params.zmr_window = 10;
    params.zmr_k = 2.0;
    params.zmr_hold = 5;

    const std::vector<double> flat(10, 100.0);
    CHECK(zmr_signal(flat, params, -1).direction == SignalDirection::hold);

    // hand-computed fixture: mean 98.3, sample sigma sqrt(380.1/9) ~= 6.4987,
    // lower band ~= 85.30, last price 80 sits below it
    const std::vector<double> dip = {100, 101, 99, 100, 102, 101, 100, 99, 101, 80};
    const Signal entry = zmr_signal(dip, params, -1);
    CHECK(entry.direction == SignalDirection::long_entry);
    CHECK(entry.strength > 0.0);
    CHECK(entry.strength <= 1.0);

    CHECK(zmr_signal(dip, params, params.zmr_hold).direction == SignalDirection::exit);
    CHECK(zmr_signal(flat, params, params.zmr_hold).direction == SignalDirection::exit);

    // held position above the mean exits
    const std::vector<double> rebound = {100, 101, 99, 100, 102, 101, 100, 99, 101, 103};
    CHECK(zmr_signal(rebound, params, 1).direction == SignalDirection::exit);

    CHECK_THROWS_AS(zmr_signal({1.0, 2.0}, params, -1), validation_error);
}

TEST_CASE("rule_agent_decide: buy & hold floors the equal-cash allocation") {
    Observation obs;
    obs.date = 0;
    obs.tickers.push_back({"A", {100.0, 100.0}, 0.0, 100.0, 100.0, 100.0, 100.0, 0.0});
    const auto account = testutil::make_account("p", 100000.0);

    const Order day0 = rule_agent_decide(StrategyKind::buy_hold, {}, obs, account, {});
    CHECK(day0.op == OrderOp::buy);
    CHECK(day0.ticker == "A");
    CHECK(day0.qty == 1000);  // floor(100000 / 100)
    CHECK(day0.price_deal == 100.0);

    Observation later = obs;
    later.date = 3;
    CHECK(rule_agent_decide(StrategyKind::buy_hold, {}, later, account, {}).op == OrderOp::hold);
}

TEST_CASE("rule_agent_decide: buy & hold splits across tickers over successive calls") {
    Observation obs;
    obs.date = 0;
    obs.tickers.push_back({"A", {50.0, 50.0}, 0.0, 50.0, 50.0, 50.0, 50.0, 0.0});
    obs.tickers.push_back({"B", {200.0, 200.0}, 0.0, 200.0, 200.0, 200.0, 200.0, 0.0});
    auto account = testutil::make_account("p", 100000.0);

    const Order first = rule_agent_decide(StrategyKind::buy_hold, {}, obs, account, {});
    CHECK(first.ticker == "A");
    CHECK(first.qty == 1000);  // floor(50000 / 50)
    account.cash -= 1000 * 50.0;
    account.holdings["A"] = {1000, 50.0};

    const Order second = rule_agent_decide(StrategyKind::buy_hold, {}, obs, account, {});
    CHECK(second.ticker == "B");
    CHECK(second.qty == 250);  // floor(50000 / 200)
}

TEST_CASE("rule_agent_decide: sma agent buys exactly on the golden-cross day") {
    StrategyParams params;
    params.sma_short = 2;
    params.sma_long = 3;

    const std::vector<double> prices = {10, 9, 8, 7, 6, 7, 9, 12, 13, 14};

    // brute-force scan for the first short-over-long cross
    int expected = -1;
    for (std::size_t t = params.sma_long; t < prices.size() && expected < 0; ++t) {
        auto mean = [&](std::size_t end, int w) {
            double s = 0;
            for (std::size_t j = end + 1 - w; j <= end; ++j) s += prices[j];
            return s / w;
        };
        const bool now = mean(t, params.sma_short) > mean(t, params.sma_long);
        const bool before = mean(t - 1, params.sma_short) > mean(t - 1, params.sma_long);
        if (now && !before) expected = static_cast<int>(t);
    }
    REQUIRE(expected > 0);

    const auto account = testutil::make_account("p", 10000.0);
    for (std::size_t t = params.sma_long; t < prices.size(); ++t) {
        Observation obs;
        obs.date = static_cast<int>(t);
        std::vector<double> closes(prices.begin(), prices.begin() + static_cast<std::ptrdiff_t>(t) + 1);
        obs.tickers.push_back(
            {"A", closes, 0.0, prices[t], prices[t], prices[t], prices[t], 0.0});
        const Order order = rule_agent_decide(StrategyKind::sma, params, obs, account, {});
        if (static_cast<int>(t) == expected)
            CHECK(order.op == OrderOp::buy);
        else
            CHECK(order.op == OrderOp::hold);
    }
}

TEST_CASE("rule_agent_decide: pure function of observation, params and position state") {
    Rng rng(1618);
    StrategyParams params;
    params.sma_short = 3;
    params.sma_long = 5;
    params.zmr_window = 5;
    for (int round = 0; round < 100; ++round) {
        Observation obs;
        obs.date = static_cast<int>(rng.uniform_int(0, 3));
        std::vector<double> closes;
        for (int i = 0; i < 12; ++i) closes.push_back(rng.uniform(50.0, 150.0));
        obs.tickers.push_back({"A", closes, 0.0, closes.back(), closes.back(), closes.back(),
                               closes.back(), 0.0});
        AgentAccount account = testutil::make_account("p", rng.uniform(100.0, 50000.0));
        RulePositionState pos;
        if (rng.chance(0.5)) {
            account.holdings["A"] = {rng.uniform_int(2, 50), 100.0};
            pos.age_days["A"] = static_cast<int>(rng.uniform_int(0, 8));
        }
        const StrategyKind kind =
            std::vector<StrategyKind>{StrategyKind::buy_hold, StrategyKind::sma, StrategyKind::zmr,
                                      StrategyKind::macd}[rng.uniform_int(0, 3)];
        const Order a = rule_agent_decide(kind, params, obs, account, pos);
        const Order b = rule_agent_decide(kind, params, obs, account, pos);
        CHECK(a.op == b.op);
        CHECK(a.ticker == b.ticker);
        CHECK(a.qty == b.qty);
        CHECK(a.price_deal == b.price_deal);
    }
}

TEST_CASE("rule_agent_decide: orders always satisfy execution preconditions") {
    Rng rng(314);
    StrategyParams params;
    params.sma_short = 3;
    params.sma_long = 5;
    params.zmr_window = 5;
    params.zmr_hold = 4;
    const StrategyKind kinds[] = {StrategyKind::buy_hold, StrategyKind::sma, StrategyKind::zmr,
                                  StrategyKind::macd};

    for (int round = 0; round < 400; ++round) {
        StockState stock = testutil::make_stock("A", rng.uniform(10.0, 500.0), 10000);
        stock.close_history.clear();
        for (int i = 0; i < 30; ++i)
            stock.close_history.push_back(std::max(1.0, stock.price_curr * rng.uniform(0.9, 1.1)));
        stock.price_curr = stock.close_history.back();
        stock.day_ref_price = stock.price_curr;

        AgentAccount account = testutil::make_account("p", rng.uniform(0.0, 50000.0));
        RulePositionState pos;
        if (rng.chance(0.5)) {
            account.holdings["A"] = {rng.uniform_int(1, 100), rng.uniform(10.0, 500.0)};
            pos.age_days["A"] = static_cast<int>(rng.uniform_int(0, 6));
        }

        Observation obs;
        obs.date = static_cast<int>(rng.uniform_int(0, 5));
        obs.tickers.push_back({"A", stock.close_history, 0.0, stock.price_curr, stock.price_curr,
                               stock.price_curr, stock.price_curr, 0.0});

        const StrategyKind kind = kinds[rng.uniform_int(0, 3)];
        Order order = rule_agent_decide(kind, params, obs, account, pos, false);
        order.agent_id = "p";
        if (order.op == OrderOp::hold) continue;

        MarketConfig mcfg;
        AgentAccount acct_copy = account;
        StockState stock_copy = stock;
        const TradeRecord rec = execute_order(order, acct_copy, stock_copy, mcfg);
        INFO("kind=" << to_string(kind) << " op=" << to_string(order.op) << " qty=" << order.qty);
        CHECK(rec.accepted);
    }
}
