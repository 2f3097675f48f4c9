#pragma once

// Minimal deterministic PNG output: an RGB canvas with line/rect/marker/text
// primitives and an encoder emitting stored (uncompressed) deflate blocks.
// No external image library; identical inputs yield identical bytes.

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "arena/common.hpp"

namespace arena {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

namespace colors {
inline constexpr Rgb white{255, 255, 255};
inline constexpr Rgb black{0, 0, 0};
inline constexpr Rgb grey{180, 180, 180};
inline constexpr Rgb light_grey{230, 230, 230};
inline constexpr Rgb blue{40, 80, 200};
inline constexpr Rgb red{200, 50, 40};
inline constexpr Rgb green{30, 140, 60};
inline constexpr Rgb orange{230, 140, 20};
} // namespace colors

namespace pngdetail {

// Classic 5x7 column-major bitmap font, glyphs 0x20..0x5A. Bundled in-repo so
// rendered bytes do not depend on any system font.
inline const std::uint8_t* glyph5x7(char c) {
    static const std::uint8_t table[59][5] = {
        {0x00, 0x00, 0x00, 0x00, 0x00}, {0x00, 0x00, 0x5F, 0x00, 0x00}, {0x00, 0x07, 0x00, 0x07, 0x00},
        {0x14, 0x7F, 0x14, 0x7F, 0x14}, {0x24, 0x2A, 0x7F, 0x2A, 0x12}, {0x23, 0x13, 0x08, 0x64, 0x62},
        {0x36, 0x49, 0x55, 0x22, 0x50}, {0x00, 0x05, 0x03, 0x00, 0x00}, {0x00, 0x1C, 0x22, 0x41, 0x00},
        {0x00, 0x41, 0x22, 0x1C, 0x00}, {0x08, 0x2A, 0x1C, 0x2A, 0x08}, {0x08, 0x08, 0x3E, 0x08, 0x08},
        {0x00, 0x50, 0x30, 0x00, 0x00}, {0x08, 0x08, 0x08, 0x08, 0x08}, {0x00, 0x60, 0x60, 0x00, 0x00},
        {0x20, 0x10, 0x08, 0x04, 0x02}, {0x3E, 0x51, 0x49, 0x45, 0x3E}, {0x00, 0x42, 0x7F, 0x40, 0x00},
        {0x42, 0x61, 0x51, 0x49, 0x46}, {0x21, 0x41, 0x45, 0x4B, 0x31}, {0x18, 0x14, 0x12, 0x7F, 0x10},
        {0x27, 0x45, 0x45, 0x45, 0x39}, {0x3C, 0x4A, 0x49, 0x49, 0x30}, {0x01, 0x71, 0x09, 0x05, 0x03},
        {0x36, 0x49, 0x49, 0x49, 0x36}, {0x06, 0x49, 0x49, 0x29, 0x1E}, {0x00, 0x36, 0x36, 0x00, 0x00},
        {0x00, 0x56, 0x36, 0x00, 0x00}, {0x00, 0x08, 0x14, 0x22, 0x41}, {0x14, 0x14, 0x14, 0x14, 0x14},
        {0x41, 0x22, 0x14, 0x08, 0x00}, {0x02, 0x01, 0x51, 0x09, 0x06}, {0x32, 0x49, 0x79, 0x41, 0x3E},
        {0x7E, 0x11, 0x11, 0x11, 0x7E}, {0x7F, 0x49, 0x49, 0x49, 0x36}, {0x3E, 0x41, 0x41, 0x41, 0x22},
        {0x7F, 0x41, 0x41, 0x22, 0x1C}, {0x7F, 0x49, 0x49, 0x49, 0x41}, {0x7F, 0x09, 0x09, 0x01, 0x01},
        {0x3E, 0x41, 0x41, 0x51, 0x32}, {0x7F, 0x08, 0x08, 0x08, 0x7F}, {0x00, 0x41, 0x7F, 0x41, 0x00},
        {0x20, 0x40, 0x41, 0x3F, 0x01}, {0x7F, 0x08, 0x14, 0x22, 0x41}, {0x7F, 0x40, 0x40, 0x40, 0x40},
        {0x7F, 0x02, 0x04, 0x02, 0x7F}, {0x7F, 0x04, 0x08, 0x10, 0x7F}, {0x3E, 0x41, 0x41, 0x41, 0x3E},
        {0x7F, 0x09, 0x09, 0x09, 0x06}, {0x3E, 0x41, 0x51, 0x21, 0x5E}, {0x7F, 0x09, 0x19, 0x29, 0x46},
        {0x46, 0x49, 0x49, 0x49, 0x31}, {0x01, 0x01, 0x7F, 0x01, 0x01}, {0x3F, 0x40, 0x40, 0x40, 0x3F},
        {0x1F, 0x20, 0x40, 0x20, 0x1F}, {0x7F, 0x20, 0x18, 0x20, 0x7F}, {0x63, 0x14, 0x08, 0x14, 0x63},
        {0x03, 0x04, 0x78, 0x04, 0x03}, {0x61, 0x51, 0x49, 0x45, 0x43},
    };
    unsigned char u = static_cast<unsigned char>(std::toupper(static_cast<unsigned char>(c)));
    if (u < 0x20 || u > 0x5A) u = 0x20;
    return table[u - 0x20];
}

inline std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t crc = 0xFFFFFFFFu) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t n = 0; n < 256; ++n) {
            std::uint32_t c = n;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[n] = c;
        }
        return t;
    }();
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    return crc;
}

inline std::uint32_t adler32(const std::uint8_t* data, std::size_t len) {
    std::uint32_t a = 1, b = 0;
    for (std::size_t i = 0; i < len; ++i) {
        a = (a + data[i]) % 65521u;
        b = (b + a) % 65521u;
    }
    return (b << 16) | a;
}

inline void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
                      const std::vector<std::uint8_t>& data) {
    put_u32_be(out, static_cast<std::uint32_t>(data.size()));
    std::vector<std::uint8_t> body(type, type + 4);
    body.insert(body.end(), data.begin(), data.end());
    out.insert(out.end(), body.begin(), body.end());
    put_u32_be(out, crc32(body.data(), body.size()) ^ 0xFFFFFFFFu);
}

} // namespace pngdetail

class Canvas {
public:
    Canvas(int width, int height, Rgb background = colors::white)
        : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * height * 3) {
        if (width < 1 || height < 1) throw validation_error("Canvas: dimensions must be positive");
        fill(background);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    void fill(Rgb c) {
        for (std::size_t i = 0; i + 2 < pixels_.size(); i += 3) {
            pixels_[i] = c.r;
            pixels_[i + 1] = c.g;
            pixels_[i + 2] = c.b;
        }
    }

    void set(int x, int y, Rgb c) {
        if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
        const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
        pixels_[i] = c.r;
        pixels_[i + 1] = c.g;
        pixels_[i + 2] = c.b;
    }

    void fill_rect(int x0, int y0, int w, int h, Rgb c) {
        for (int y = y0; y < y0 + h; ++y)
            for (int x = x0; x < x0 + w; ++x) set(x, y, c);
    }

    void rect(int x0, int y0, int w, int h, Rgb c) {
        for (int x = x0; x < x0 + w; ++x) {
            set(x, y0, c);
            set(x, y0 + h - 1, c);
        }
        for (int y = y0; y < y0 + h; ++y) {
            set(x0, y, c);
            set(x0 + w - 1, y, c);
        }
    }

    void line(int x0, int y0, int x1, int y1, Rgb c) {
        const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
        const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        while (true) {
            set(x0, y0, c);
            if (x0 == x1 && y0 == y1) break;
            const int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x0 += sx;
            }
            if (e2 <= dx) {
                err += dx;
                y0 += sy;
            }
        }
    }

    // Upward (buy) or downward (sell) triangle marker centered on (x, y).
    void triangle_marker(int x, int y, int half, bool up, Rgb c) {
        for (int row = 0; row <= half * 2; ++row) {
            const int span = up ? row / 2 : (half * 2 - row) / 2;
            const int yy = y - half + row;
            for (int xx = x - span; xx <= x + span; ++xx) set(xx, yy, c);
        }
    }

    void cross_marker(int x, int y, int half, Rgb c) {
        line(x - half, y, x + half, y, c);
        line(x, y - half, x, y + half, c);
    }

    void text(int x, int y, const std::string& s, Rgb c) {
        for (char ch : s) {
            const std::uint8_t* g = pngdetail::glyph5x7(ch);
            for (int col = 0; col < 5; ++col)
                for (int row = 0; row < 7; ++row)
                    if (g[col] & (1u << row)) set(x + col, y + row, c);
            x += 6;
        }
    }

    static int text_width(const std::string& s) { return static_cast<int>(s.size()) * 6; }

    std::vector<std::uint8_t> encode_png() const {
        using namespace pngdetail;
        std::vector<std::uint8_t> out = {137, 80, 78, 71, 13, 10, 26, 10};

        std::vector<std::uint8_t> ihdr;
        put_u32_be(ihdr, static_cast<std::uint32_t>(width_));
        put_u32_be(ihdr, static_cast<std::uint32_t>(height_));
        ihdr.push_back(8);  // bit depth
        ihdr.push_back(2);  // truecolor RGB
        ihdr.push_back(0);
        ihdr.push_back(0);
        ihdr.push_back(0);
        put_chunk(out, "IHDR", ihdr);

        // Raw scanlines, filter byte 0 per row.
        std::vector<std::uint8_t> raw;
        raw.reserve(static_cast<std::size_t>(height_) * (1 + static_cast<std::size_t>(width_) * 3));
        for (int y = 0; y < height_; ++y) {
            raw.push_back(0);
            const std::size_t off = static_cast<std::size_t>(y) * width_ * 3;
            raw.insert(raw.end(), pixels_.begin() + off, pixels_.begin() + off + static_cast<std::size_t>(width_) * 3);
        }

        // zlib wrapper around stored deflate blocks.
        std::vector<std::uint8_t> idat = {0x78, 0x01};
        std::size_t pos = 0;
        while (pos < raw.size()) {
            const std::size_t n = std::min<std::size_t>(65535, raw.size() - pos);
            const bool final = pos + n == raw.size();
            idat.push_back(final ? 0x01 : 0x00);
            idat.push_back(static_cast<std::uint8_t>(n & 0xFF));
            idat.push_back(static_cast<std::uint8_t>(n >> 8));
            idat.push_back(static_cast<std::uint8_t>(~n & 0xFF));
            idat.push_back(static_cast<std::uint8_t>((~n >> 8) & 0xFF));
            idat.insert(idat.end(), raw.begin() + pos, raw.begin() + pos + n);
            pos += n;
        }
        put_u32_be(idat, adler32(raw.data(), raw.size()));
        put_chunk(out, "IDAT", idat);
        put_chunk(out, "IEND", {});
        return out;
    }

    void save_png(const std::string& path) const {
        const auto bytes = encode_png();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw lookup_error("cannot open for writing: " + path);
        f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw lookup_error("write failed: " + path);
    }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

} // namespace arena
