#pragma once

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "hintgen/errors.hpp"
#include "hintgen/llm.hpp"

// Single-shot chat-completions POST. Retry policy lives in the gateway; this
// function reports one attempt's outcome and nothing more.

namespace hintgen::detail {

struct SplitUrl {
    std::string base; // scheme://host[:port]
    std::string path; // leading slash, "/" when the url has none
};

inline SplitUrl split_url(const std::string& url) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw Error("endpoint must include a scheme: " + url);
    size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string http_chat_complete(const BackendConfig& cfg, const std::string& prompt) {
    SplitUrl url = split_url(cfg.endpoint);

    httplib::Client client(url.base);
    client.set_connection_timeout(cfg.timeout);
    client.set_read_timeout(cfg.timeout);
    client.set_write_timeout(cfg.timeout);

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    nlohmann::json body;
    body["model"] = cfg.model_name;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = cfg.temperature;

    httplib::Result res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) {
        if (res.error() == httplib::Error::ConnectionTimeout ||
            res.error() == httplib::Error::Read)
            throw TimeoutError("no response from " + cfg.endpoint + " within timeout");
        throw NetworkError("request to " + cfg.endpoint + " failed: " +
                           httplib::to_string(res.error()));
    }
    if (res->status != 200)
        throw NetworkError("endpoint returned status " + std::to_string(res->status) + ": " +
                           res->body.substr(0, 200));

    try {
        nlohmann::json reply = nlohmann::json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw NetworkError(std::string("malformed chat-completions response: ") + e.what());
    }
}

} // namespace hintgen::detail
