#pragma once

// HTTP transport for the gateway: POSTs an OpenAI-compatible chat-completion
// body to {base_url}/chat/completions and returns choices[0].message.content.
// Split from gateway.hpp so offline builds and tests stay light.

#include <httplib.h>

#include "arena/gateway.hpp"

namespace arena {

class HttpBackend : public Backend {
public:
    explicit HttpBackend(GatewayConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.base_url.empty()) throw validation_error("HttpBackend: base_url not configured");
    }

    std::string send(const CompletionRequest& req) override {
        httplib::Client client(cfg_.base_url);
        client.set_connection_timeout(cfg_.timeout_s, 0);
        client.set_read_timeout(cfg_.timeout_s, 0);
        client.set_write_timeout(cfg_.timeout_s, 0);
        if (!cfg_.api_key.empty()) client.set_bearer_token_auth(cfg_.api_key);

        const nlohmann::json body = gwdetail::build_wire_body(req);
        auto res = client.Post("/chat/completions", body.dump(), "application/json");
        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                err == httplib::Error::Write)
                throw timeout_error("http: " + httplib::to_string(err));
            throw transport_error("http: " + httplib::to_string(err));
        }
        if (res->status < 200 || res->status >= 300)
            throw api_error(res->status, "http status " + std::to_string(res->status) + ": " + res->body);

        nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty())
            throw transport_error("http: malformed completion response");
        const auto& msg = parsed["choices"][0]["message"];
        if (!msg.contains("content") || !msg["content"].is_string())
            throw transport_error("http: response message has no text content");
        return msg["content"].get<std::string>();
    }

private:
    GatewayConfig cfg_;
};

} // namespace arena
