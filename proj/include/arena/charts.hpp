#pragma once

// Chart renderers for the visual observation inputs: per-ticker price lines,
// candlesticks, a holdings bar chart and the per-agent trade scatter. PNG
// out, deterministic bytes for equal inputs.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "arena/market.hpp"
#include "arena/png.hpp"

namespace arena {

enum class ChartKind { line, candlestick, holdings_bar, trade_scatter };

inline const char* to_string(ChartKind k) {
    switch (k) {
        case ChartKind::line: return "line";
        case ChartKind::candlestick: return "candlestick";
        case ChartKind::holdings_bar: return "holdings_bar";
        default: return "trade_scatter";
    }
}

struct ChartSpec {
    ChartKind kind = ChartKind::line;
    int width_px = 640;
    int height_px = 480;
    std::string title;

    void validate() const {
        if (width_px < 64 || height_px < 64) throw validation_error("chart dimensions must be >= 64px");
    }
};

struct Ohlc {
    double open = 0.0, high = 0.0, low = 0.0, close = 0.0;
};

namespace chartdetail {

struct Frame {
    int left, top, right, bottom;  // plot area in pixels
    double lo, hi;                 // value range mapped onto [bottom, top]

    int x_of(double idx, double max_idx) const {
        if (max_idx <= 0.0) return left;
        return left + static_cast<int>(std::lround((right - left) * (idx / max_idx)));
    }
    int y_of(double v) const {
        if (hi <= lo) return (top + bottom) / 2;
        const double t = (v - lo) / (hi - lo);
        return bottom - static_cast<int>(std::lround((bottom - top) * t));
    }
};

inline Frame make_frame(Canvas& cv, const ChartSpec& spec, double lo, double hi, double max_idx) {
    if (hi <= lo) {
        const double pad = std::max(1.0, std::abs(hi) * 0.05);
        lo -= pad;
        hi += pad;
    } else {
        const double pad = (hi - lo) * 0.05;
        lo -= pad;
        hi += pad;
    }
    Frame f{48, 24, cv.width() - 12, cv.height() - 22, lo, hi};

    if (!spec.title.empty())
        cv.text(std::max(2, (cv.width() - Canvas::text_width(spec.title)) / 2), 8, spec.title, colors::black);
    cv.rect(f.left, f.top, f.right - f.left + 1, f.bottom - f.top + 1, colors::grey);

    // Price gridlines and labels on the left, date-index ticks below.
    for (int i = 0; i <= 4; ++i) {
        const double v = lo + (hi - lo) * i / 4.0;
        const int y = f.y_of(v);
        if (i > 0 && i < 4)
            for (int x = f.left + 1; x < f.right; x += 3) cv.set(x, y, colors::light_grey);
        cv.text(2, y - 3, fmt_fixed(v, v < 100 ? 2 : 1), colors::black);
    }
    const int xticks = std::min(6, static_cast<int>(max_idx) + 1);
    for (int i = 0; i < xticks; ++i) {
        const double idx = max_idx * i / std::max(1, xticks - 1);
        const int x = f.x_of(idx, max_idx);
        cv.line(x, f.bottom, x, f.bottom + 3, colors::grey);
        cv.text(x - 3, f.bottom + 6, std::to_string(static_cast<long>(std::lround(idx))), colors::black);
    }
    return f;
}

} // namespace chartdetail

// Closing-price line over the date index.
inline void render_price_line(const std::vector<double>& prices, const ChartSpec& spec,
                              const std::string& path) {
    spec.validate();
    if (prices.size() < 2) throw validation_error("render_price_line: need at least 2 points");
    Canvas cv(spec.width_px, spec.height_px);
    const auto [mn, mx] = std::minmax_element(prices.begin(), prices.end());
    const auto f = chartdetail::make_frame(cv, spec, *mn, *mx, static_cast<double>(prices.size() - 1));
    for (std::size_t i = 1; i < prices.size(); ++i)
        cv.line(f.x_of(static_cast<double>(i - 1), prices.size() - 1.0), f.y_of(prices[i - 1]),
                f.x_of(static_cast<double>(i), prices.size() - 1.0), f.y_of(prices[i]), colors::blue);
    cv.save_png(path);
}

// Daily K-line chart; up-days hollow, down-days filled for grayscale
// robustness. OHLC ordering is validated per bar.
inline void render_candlestick(const std::vector<Ohlc>& bars, const ChartSpec& spec,
                               const std::string& path) {
    spec.validate();
    if (bars.empty()) throw validation_error("render_candlestick: empty series");
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const Ohlc& b = bars[i];
        if (b.low > std::min(b.open, b.close) || b.high < std::max(b.open, b.close) || b.low > b.high)
            throw validation_error("render_candlestick: OHLC ordering violated at bar " + std::to_string(i));
    }
    Canvas cv(spec.width_px, spec.height_px);
    double lo = bars[0].low, hi = bars[0].high;
    for (const auto& b : bars) {
        lo = std::min(lo, b.low);
        hi = std::max(hi, b.high);
    }
    const auto f = chartdetail::make_frame(cv, spec, lo, hi, static_cast<double>(bars.size() - 1));
    const int slot = std::max(3, (f.right - f.left) / std::max<int>(1, static_cast<int>(bars.size())));
    const int half = std::max(1, slot / 3);
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const Ohlc& b = bars[i];
        const int x = f.x_of(static_cast<double>(i), std::max<double>(1.0, bars.size() - 1.0));
        const bool up = b.close >= b.open;
        const Rgb color = up ? colors::green : colors::red;
        cv.line(x, f.y_of(b.high), x, f.y_of(b.low), color);
        const int ytop = f.y_of(std::max(b.open, b.close));
        const int ybot = f.y_of(std::min(b.open, b.close));
        const int h = std::max(1, ybot - ytop + 1);
        if (up)
            cv.rect(x - half, ytop, 2 * half + 1, h, color);
        else
            cv.fill_rect(x - half, ytop, 2 * half + 1, h, color);
    }
    cv.save_png(path);
}

// Current share counts per ticker.
inline void render_holdings_bar(const std::vector<std::pair<std::string, long long>>& holdings,
                                const ChartSpec& spec, const std::string& path) {
    spec.validate();
    Canvas cv(spec.width_px, spec.height_px);
    long long maxq = 1;
    for (const auto& [ticker, qty] : holdings) maxq = std::max(maxq, qty);
    const auto f = chartdetail::make_frame(cv, spec, 0.0, static_cast<double>(maxq),
                                           std::max<double>(1.0, static_cast<double>(holdings.size())));
    const int n = std::max<int>(1, static_cast<int>(holdings.size()));
    const int slot = (f.right - f.left) / n;
    for (std::size_t i = 0; i < holdings.size(); ++i) {
        const int x0 = f.left + static_cast<int>(i) * slot + slot / 6;
        const int w = std::max(2, slot * 2 / 3);
        const int ytop = f.y_of(static_cast<double>(holdings[i].second));
        cv.fill_rect(x0, ytop, w, std::max(1, f.bottom - ytop), colors::orange);
        cv.text(x0 + std::max(0, (w - Canvas::text_width(holdings[i].first)) / 2), f.bottom + 6,
                holdings[i].first, colors::black);
    }
    cv.save_png(path);
}

// Executed trades over the date axis: buys as upward triangles, sells as
// downward. An empty trade list renders empty axes.
inline void render_trade_scatter(const std::vector<TradeRecord>& trades, const ChartSpec& spec,
                                 const std::string& path) {
    spec.validate();
    Canvas cv(spec.width_px, spec.height_px);
    double lo = 0.0, hi = 1.0, max_date = 1.0;
    bool any = false;
    for (const auto& t : trades) {
        if (!t.accepted || t.order.op == OrderOp::hold) continue;
        if (!any) {
            lo = hi = t.executed_price;
            any = true;
        }
        lo = std::min(lo, t.executed_price);
        hi = std::max(hi, t.executed_price);
        max_date = std::max(max_date, static_cast<double>(t.order.date));
    }
    const auto f = chartdetail::make_frame(cv, spec, lo, hi, max_date);
    for (const auto& t : trades) {
        if (!t.accepted || t.order.op == OrderOp::hold) continue;
        const int x = f.x_of(static_cast<double>(t.order.date), max_date);
        const int y = f.y_of(t.executed_price);
        if (t.order.op == OrderOp::buy)
            cv.triangle_marker(x, y, 4, true, colors::green);
        else
            cv.triangle_marker(x, y, 4, false, colors::red);
    }
    cv.save_png(path);
}

// File naming convention consumed by the agent pipeline.
inline std::string chart_path(const std::string& run_dir, int date, const std::string& name,
                              ChartKind kind) {
    return run_dir + "/" + std::to_string(date) + "/" + name + "_" + to_string(kind) + ".png";
}

} // namespace arena
