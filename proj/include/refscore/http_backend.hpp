#pragma once
// httplib-backed implementation of HttpBackend. Include from exactly the
// translation units that talk to a live endpoint.

#include <httplib.h>

#include "refscore/client.hpp"

namespace refscore {

inline HttpBackend::HttpBackend(ModelConfig cfg) : cfg_(std::move(cfg)) {
    const std::string& url = cfg_.endpoint_url;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw std::invalid_argument("endpoint url missing scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        base_url_ = url;
        path_ = "/v1/chat/completions";
    } else {
        base_url_ = url.substr(0, path_start);
        path_ = url.substr(path_start);
    }
}

inline std::string HttpBackend::generate(const PromptPair& prompt) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(cfg_.timeout_seconds, 0);
    client.set_read_timeout(cfg_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!cfg_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    std::string body = build_request_body(prompt, cfg_).dump();
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res)
        throw std::runtime_error("transport failure: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw std::runtime_error("endpoint returned status " + std::to_string(res->status));

    auto j = nlohmann::json::parse(res->body);
    if (!j.contains("choices") || j["choices"].empty())
        throw std::runtime_error("response has no choices");
    const auto& msg = j["choices"][0];
    if (msg.contains("message") && msg["message"].contains("content"))
        return msg["message"]["content"].get<std::string>();
    if (msg.contains("text"))
        return msg["text"].get<std::string>();
    throw std::runtime_error("response choice has no content");
}

} // namespace refscore
