#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arena {

// Thrown for malformed inputs (bad config, bad CSV row, bad argument).
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a referenced entity (ticker, agent, file) does not exist.
struct lookup_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// FNV-1a, used wherever a portable deterministic hash is needed
// (stub backends, seeded shuffles). std::hash is implementation-defined.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 1469598103934665603ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// xorshift mix for deriving independent streams from one seed.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ull;
    x ^= x >> 33;
    return x;
}

// Fixed-decimal formatting; printf-based so output is locale independent.
inline std::string fmt_fixed(double v, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// Signed percentage in the style used by the observation prompts: "+0.58%".
inline std::string fmt_signed_pct(double pct, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%+.*f%%", decimals, pct);
    return buf;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// Price list in the prompt style: "[437.80, 459.44, 465.25]".
inline std::string fmt_price_list(const std::vector<double>& prices, int decimals = 2) {
    std::vector<std::string> parts;
    parts.reserve(prices.size());
    for (double p : prices) parts.push_back(fmt_fixed(p, decimals));
    return "[" + join(parts, ", ") + "]";
}

} // namespace arena
