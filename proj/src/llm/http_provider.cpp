#include "foamforge/llm/http_provider.hpp"

#include <cstdlib>

#include "foamforge/core/error.hpp"
#include "httplib.h"
#include "json.hpp"

using nlohmann::json;

namespace foamforge::llm {

HttpProvider::HttpProvider(HttpProviderSettings settings) : settings_(std::move(settings)) {
    if (settings_.base_url.empty()) throw ConfigError("http provider: base_url is required");
    const char* key = std::getenv(settings_.api_key_env.c_str());
    api_key_ = key ? key : "";

    std::string url = settings_.base_url;
    if (url.rfind("https://", 0) == 0) {
        https_ = true;
        url = url.substr(8);
    } else if (url.rfind("http://", 0) == 0) {
        url = url.substr(7);
    }
    auto slash = url.find('/');
    host_ = url.substr(0, slash);
    path_prefix_ = slash == std::string::npos ? "" : url.substr(slash);
    if (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string HttpProvider::post_json(const std::string& path, const std::string& body) {
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto do_post = [&](auto& client) {
        client.set_read_timeout(settings_.timeout_seconds, 0);
        return client.Post((path_prefix_ + path).c_str(), headers, body, "application/json");
    };

    httplib::Result res = [&] {
        if (https_) {
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
            httplib::SSLClient client(host_);
            return do_post(client);
#else
            throw ConfigError("https backend requested but TLS support is not compiled in; "
                              "use an http:// gateway");
#endif
        }
        httplib::Client client(host_);
        return do_post(client);
    }();

    if (!res) throw ProviderFailure("http provider: request to " + host_ + path + " failed");
    if (res->status < 200 || res->status >= 300) {
        throw ProviderFailure("http provider: status " + std::to_string(res->status) + ": " +
                              res->body);
    }
    return res->body;
}

CompletionResult HttpProvider::complete(const CompletionRequest& request) {
    json body{
        {"model", settings_.model},
        {"temperature", request.temperature},
        {"messages",
         json::array({json{{"role", "system"}, {"content", request.system_prompt}},
                      json{{"role", "user"}, {"content", request.user_prompt}}})},
    };
    json res = json::parse(post_json("/chat/completions", body.dump()));

    CompletionResult out;
    out.text = res.at("choices").at(0).at("message").at("content").get<std::string>();
    if (res.contains("usage")) {
        out.prompt_tokens = res["usage"].value("prompt_tokens", 0);
        out.completion_tokens = res["usage"].value("completion_tokens", 0);
    }
    return out;
}

std::vector<float> HttpProvider::embed(const std::string& text) {
    json body{{"model", settings_.embed_model}, {"input", text}};
    json res = json::parse(post_json("/embeddings", body.dump()));
    auto vec = res.at("data").at(0).at("embedding").get<std::vector<float>>();
    if (static_cast<int>(vec.size()) != settings_.embedding_dim) {
        throw DimensionMismatch("embedding backend returned " + std::to_string(vec.size()) +
                                " dims, expected " + std::to_string(settings_.embedding_dim));
    }
    return vec;
}

}  // namespace foamforge::llm
