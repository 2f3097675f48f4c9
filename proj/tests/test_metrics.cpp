#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "arena/metrics.hpp"
#include "arena/ohlcv.hpp"
#include "helpers.hpp"

using namespace arena;
using testutil::Rng;

namespace {

// Brute-force metric references, long double throughout.
long double tr_oracle(long double c0, long double c1) { return (c1 - c0) / c0; }

long double wr_oracle(const std::vector<double>& r) {
    long double wins = 0;
    for (double x : r)
        if (x > 0.0) wins += 1;
    return wins / static_cast<long double>(r.size());
}

std::pair<long double, long double> mean_std_oracle(const std::vector<double>& r) {
    long double mean = 0;
    for (double x : r) mean += x;
    mean /= static_cast<long double>(r.size());
    long double sq = 0;
    for (double x : r) sq += (x - mean) * (x - mean);
    return {mean, std::sqrt(sq / static_cast<long double>(r.size() - 1))};
}

std::string write_temp_csv(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream f(path);
    f << body;
    return path.string();
}

} // namespace

TEST_CASE("total_return: pinned examples") {
    CHECK(total_return(100000.0, 115990.0) == Approx(0.1599).epsilon(1e-12));
    CHECK(total_return(5000.0, 5000.0) == 0.0);
    CHECK(total_return(100000.0, 90000.0) == Approx(-0.10).epsilon(1e-12));
    CHECK_THROWS_AS(total_return(0.0, 100.0), validation_error);
}

TEST_CASE("win_rate: zero-return days are non-wins") {
    CHECK(win_rate({0.01, -0.01, 0.02, 0.0, -0.03}) == Approx(0.4));
    CHECK(win_rate({0.1, 0.2, 0.3}) == 1.0);
    CHECK(win_rate({0.0, 0.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(win_rate({}), validation_error);
}

TEST_CASE("sharpe: sample std, zero risk-free, undefined on zero variance") {
    const SharpeResult sr = sharpe({0.01, 0.03});
    REQUIRE(sr.defined);
    CHECK(sr.value == Approx(0.02 / std::sqrt(0.0002)).epsilon(1e-12));
    CHECK(sr.value == Approx(1.41421356237).epsilon(1e-9));

    CHECK_FALSE(sharpe({0.02, 0.02, 0.02}).defined);

    const SharpeResult zero_mean = sharpe({0.01, -0.01, 0.01, -0.01});
    REQUIRE(zero_mean.defined);
    CHECK(zero_mean.value == Approx(0.0).margin(1e-15));

    CHECK_THROWS_AS(sharpe({0.01}), validation_error);
}

TEST_CASE("mean_std: pinned examples") {
    const MeanStd ms = mean_std({0.01, 0.03});
    CHECK(ms.mean == Approx(0.02).epsilon(1e-14));
    CHECK(ms.stddev == Approx(std::sqrt(0.0002)).epsilon(1e-12));
    CHECK(mean_std({0.5, 0.5, 0.5}).stddev == 0.0);
    CHECK_THROWS_AS(mean_std({0.01}), validation_error);
}

TEST_CASE("metrics agree with brute-force references on random series") {
    Rng rng(1001);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(2, 60));
        std::vector<double> rets;
        for (int i = 0; i < n; ++i) rets.push_back(rng.uniform(-0.05, 0.05));

        const auto [want_mean, want_std] = mean_std_oracle(rets);
        const MeanStd ms = mean_std(rets);
        CHECK(std::abs(ms.mean - static_cast<double>(want_mean)) <= 1e-12);
        CHECK(std::abs(ms.stddev - static_cast<double>(want_std)) <= 1e-12);
        CHECK(std::abs(win_rate(rets) - static_cast<double>(wr_oracle(rets))) <= 1e-12);

        const double c0 = rng.uniform(1.0, 1e6), c1 = rng.uniform(1.0, 1e6);
        CHECK(std::abs(total_return(c0, c1) - static_cast<double>(tr_oracle(c0, c1))) <= 1e-12);

        const SharpeResult sr = sharpe(rets);
        if (want_std != 0.0L) {
            REQUIRE(sr.defined);
            CHECK(std::abs(sr.value - static_cast<double>(want_mean / want_std)) <= 1e-12);
        }
    }
}

TEST_CASE("equity curve summary wires the metrics together") {
    EquityCurve curve;
    curve.dates = {-1, 0, 1, 2};
    curve.wealth = {100000.0, 101000.0, 100500.0, 103000.0};
    const BacktestReport rep = summarize_curve(curve, 100000.0);
    CHECK(rep.tr_pct == Approx(3.0).epsilon(1e-12));
    CHECK(rep.wr_pct == Approx(100.0 * 2.0 / 3.0));
    CHECK(rep.sr_defined);
}

TEST_CASE("load_ohlcv_csv: happy path, ordering, validation errors") {
    SECTION("three rows in date order") {
        const auto path = write_temp_csv("ok.csv",
                                         "date,open,high,low,close,volume\n"
                                         "2024-09-03,100,105,99,103,1000\n"
                                         "2024-09-04,103,104,101,102,900\n"
                                         "2024-09-05,102,110,102,109,1500\n");
        const auto res = load_ohlcv_csv(path);
        REQUIRE(res.bars.size() == 3);
        CHECK_FALSE(res.sorted_on_load);
        CHECK(res.bars[0].date == "2024-09-03");
        CHECK(res.bars[2].close == 109.0);
    }
    SECTION("high below low names the offending line") {
        const auto path = write_temp_csv("bad.csv",
                                         "date,open,high,low,close,volume\n"
                                         "2024-09-03,100,105,99,103,1000\n"
                                         "2024-09-04,103,98,101,102,900\n");
        CHECK_THROWS_WITH(load_ohlcv_csv(path), Catch::Contains("line 3"));
    }
    SECTION("shuffled dates sort with a flag") {
        const auto path = write_temp_csv("shuffled.csv",
                                         "date,open,high,low,close,volume\n"
                                         "2024-09-05,102,110,102,109,1500\n"
                                         "2024-09-03,100,105,99,103,1000\n"
                                         "2024-09-04,103,104,101,102,900\n");
        const auto res = load_ohlcv_csv(path);
        CHECK(res.sorted_on_load);
        CHECK(res.bars.front().date == "2024-09-03");
        CHECK(res.bars.back().date == "2024-09-05");
    }
    SECTION("malformed number names the line") {
        const auto path = write_temp_csv("garbled.csv",
                                         "date,open,high,low,close,volume\n"
                                         "2024-09-03,100,105,xx,103,1000\n");
        CHECK_THROWS_WITH(load_ohlcv_csv(path), Catch::Contains("line 2"));
    }
    SECTION("custom column names") {
        const auto path = write_temp_csv("cols.csv",
                                         "Day,O,H,L,C,Vol\n"
                                         "2024-09-03,100,105,99,103,1000\n");
        CsvColumnMap cols;
        cols.date = "Day";
        cols.open = "O";
        cols.high = "H";
        cols.low = "L";
        cols.close = "C";
        cols.volume = "Vol";
        CHECK(load_ohlcv_csv(path, cols).bars.size() == 1);
    }
    SECTION("missing file and missing column") {
        CHECK_THROWS_AS(load_ohlcv_csv("/nonexistent/x.csv"), lookup_error);
        const auto path = write_temp_csv("nocol.csv", "date,open,high,low,close\n");
        CHECK_THROWS_AS(load_ohlcv_csv(path), validation_error);
    }
}
