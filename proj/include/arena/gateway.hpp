#pragma once

// Chat-completion client speaking the OpenAI-compatible JSON protocol, with
// image attachments as base64 data URLs, bounded retries, strict JSON output
// extraction, and deterministic offline backends for tests and stub runs.

#include <chrono>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "arena/common.hpp"

namespace arena {

struct gateway_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct transport_error : gateway_error {
    using gateway_error::gateway_error;
};
struct timeout_error : transport_error {
    using transport_error::transport_error;
};
struct api_error : gateway_error {
    int status;
    api_error(int status_, const std::string& what_) : gateway_error(what_), status(status_) {}
};
struct parse_error : gateway_error {
    using gateway_error::gateway_error;
};

struct UserPart {
    enum class Kind { text, image_path } kind = Kind::text;
    std::string value;

    static UserPart text(std::string t) { return {Kind::text, std::move(t)}; }
    static UserPart image(std::string path) { return {Kind::image_path, std::move(path)}; }
};

struct CompletionRequest {
    std::string model;
    std::string system;
    std::vector<UserPart> user_parts;
    double temperature = 0.7;
    int max_tokens = 1024;
    std::optional<long long> seed;

    std::string user_text() const {
        std::string out;
        for (const auto& p : user_parts)
            if (p.kind == UserPart::Kind::text) out += p.value;
        return out;
    }
    std::size_t image_count() const {
        std::size_t n = 0;
        for (const auto& p : user_parts)
            if (p.kind == UserPart::Kind::image_path) ++n;
        return n;
    }
};

struct CompletionResult {
    std::string raw_text;
    std::optional<nlohmann::json> parsed;
    int attempts = 0;
    double latency_ms = 0.0;
};

struct GatewayConfig {
    std::string base_url;  // e.g. https://api.openai.com/v1
    std::string api_key;
    std::string model = "stub";
    double temperature = 0.7;
    int max_attempts = 3;
    int backoff_base_ms = 250;
    int timeout_s = 120;
    std::string trace_path;  // JSONL request/response log when non-empty

    static GatewayConfig from_env() {
        GatewayConfig cfg;
        if (const char* v = std::getenv("ARENA_LLM_BASE_URL")) cfg.base_url = v;
        if (const char* v = std::getenv("ARENA_LLM_API_KEY")) cfg.api_key = v;
        if (const char* v = std::getenv("ARENA_LLM_MODEL")) cfg.model = v;
        return cfg;
    }
};

// Transport abstraction under the retry loop; send() returns the assistant
// text or throws a gateway_error.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string send(const CompletionRequest& req) = 0;
    virtual bool vision_capable() const { return true; }
};

namespace gwdetail {

inline std::string base64(const std::vector<unsigned char>& data) {
    static const char tbl[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < data.size(); i += 3) {
        const unsigned v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += tbl[(v >> 6) & 63];
        out += tbl[v & 63];
    }
    if (i + 1 == data.size()) {
        const unsigned v = data[i] << 16;
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == data.size()) {
        const unsigned v = (data[i] << 16) | (data[i + 1] << 8);
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += tbl[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

inline std::string data_url_for(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw lookup_error("cannot read image: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return "data:image/png;base64," + base64(bytes);
}

// OpenAI-style chat body: system message plus one user message whose content
// is a text/image_url part array (plain string when text only).
inline nlohmann::json build_wire_body(const CompletionRequest& req) {
    nlohmann::json messages = nlohmann::json::array();
    if (!req.system.empty()) messages.push_back({{"role", "system"}, {"content", req.system}});
    if (req.image_count() == 0) {
        messages.push_back({{"role", "user"}, {"content", req.user_text()}});
    } else {
        nlohmann::json parts = nlohmann::json::array();
        for (const auto& p : req.user_parts) {
            if (p.kind == UserPart::Kind::text)
                parts.push_back({{"type", "text"}, {"text", p.value}});
            else
                parts.push_back({{"type", "image_url"}, {"image_url", {{"url", data_url_for(p.value)}}}});
        }
        messages.push_back({{"role", "user"}, {"content", parts}});
    }
    nlohmann::json body = {{"model", req.model},
                           {"messages", messages},
                           {"temperature", req.temperature},
                           {"max_tokens", req.max_tokens}};
    if (req.seed) body["seed"] = *req.seed;
    return body;
}

} // namespace gwdetail

// Deterministic test backend: a fixed script of replies and failures,
// consumed in order. The last script entry repeats once exhausted.
class ScriptedBackend : public Backend {
public:
    struct Step {
        enum class Kind { reply, transport_failure, api_failure } kind = Kind::reply;
        std::string text;
        int status = 0;
    };

    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<std::string> replies) {
        for (auto& r : replies) script_.push_back({Step::Kind::reply, std::move(r), 0});
    }

    ScriptedBackend& reply(std::string text) {
        script_.push_back({Step::Kind::reply, std::move(text), 0});
        return *this;
    }
    ScriptedBackend& fail_transport(int times = 1) {
        for (int i = 0; i < times; ++i) script_.push_back({Step::Kind::transport_failure, "", 0});
        return *this;
    }
    ScriptedBackend& fail_api(int status) {
        script_.push_back({Step::Kind::api_failure, "", status});
        return *this;
    }

    std::string send(const CompletionRequest&) override {
        if (script_.empty()) throw transport_error("scripted backend: no steps configured");
        const Step step = script_.size() == 1 ? script_.front() : pop();
        switch (step.kind) {
            case Step::Kind::transport_failure: throw transport_error("scripted transport failure");
            case Step::Kind::api_failure: throw api_error(step.status, "scripted api failure");
            default: return step.text;
        }
    }

    std::size_t remaining() const { return script_.size(); }

private:
    Step pop() {
        Step s = script_.front();
        script_.pop_front();
        return s;
    }
    std::deque<Step> script_;
};

// Retry loop with exponential backoff. Transport failures and retryable
// statuses (429, 5xx) are retried up to cfg.max_attempts; other API errors
// surface immediately.
inline CompletionResult complete(Backend& backend, const CompletionRequest& req,
                                 const GatewayConfig& cfg) {
    if (req.image_count() > 0 && !backend.vision_capable())
        throw validation_error("request carries image parts but the backend is not vision-capable");
    if (req.user_parts.empty())
        throw validation_error("completion request needs at least one user part");
    const auto t0 = std::chrono::steady_clock::now();
    CompletionResult result;
    std::string last_error;
    bool timed_out = false;

    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        result.attempts = attempt;
        try {
            result.raw_text = backend.send(req);
            result.latency_ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
            if (!cfg.trace_path.empty()) {
                std::ofstream trace(cfg.trace_path, std::ios::app);
                trace << nlohmann::json{{"request", gwdetail::build_wire_body(req)},
                                        {"response", result.raw_text},
                                        {"attempts", result.attempts}}
                             .dump()
                      << "\n";
            }
            return result;
        } catch (const api_error& e) {
            const bool retryable = e.status == 429 || e.status >= 500;
            if (!retryable) throw;
            last_error = e.what();
        } catch (const timeout_error& e) {
            timed_out = true;
            last_error = e.what();
        } catch (const transport_error& e) {
            last_error = e.what();
        }
        if (attempt < cfg.max_attempts && cfg.backoff_base_ms > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(cfg.backoff_base_ms << (attempt - 1)));
    }
    if (!cfg.trace_path.empty()) {
        std::ofstream trace(cfg.trace_path, std::ios::app);
        trace << nlohmann::json{{"request", gwdetail::build_wire_body(req)},
                                {"error", last_error},
                                {"attempts", result.attempts}}
                     .dump()
              << "\n";
    }
    if (timed_out) throw timeout_error("gateway: timed out after " + std::to_string(cfg.max_attempts) +
                                       " attempts: " + last_error);
    throw transport_error("gateway: failed after " + std::to_string(cfg.max_attempts) +
                          " attempts: " + last_error);
}

// Extracts the first well-formed JSON object from raw model output,
// tolerating code fences and surrounding prose, then checks required keys.
inline nlohmann::json parse_json_output(const std::string& raw,
                                        const std::vector<std::string>& required_keys = {}) {
    std::size_t pos = 0;
    while ((pos = raw.find('{', pos)) != std::string::npos) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = pos; i < raw.size(); ++i) {
            const char c = raw[i];
            if (in_string) {
                if (escaped)
                    escaped = false;
                else if (c == '\\')
                    escaped = true;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"')
                in_string = true;
            else if (c == '{')
                ++depth;
            else if (c == '}') {
                --depth;
                if (depth == 0) {
                    const std::string candidate = raw.substr(pos, i - pos + 1);
                    nlohmann::json parsed = nlohmann::json::parse(candidate, nullptr, false);
                    if (!parsed.is_discarded() && parsed.is_object()) {
                        for (const auto& key : required_keys)
                            if (!parsed.contains(key))
                                throw parse_error("model output JSON missing key '" + key + "'");
                        return parsed;
                    }
                    break;  // malformed from this brace; try the next one
                }
            }
        }
        ++pos;
    }
    throw parse_error("no JSON object found in model output");
}

} // namespace arena
