#pragma once

#include <string>

#include "foamforge/llm/provider.hpp"

namespace foamforge::llm {

/// Settings for an OpenAI-compatible chat/embeddings backend. The key is
/// read from the named environment variable, never stored in files.
struct HttpProviderSettings {
    std::string base_url;       // e.g. https://api.openai.com/v1
    std::string model;          // chat model name
    std::string embed_model;    // embedding model name
    std::string api_key_env = "OPENAI_API_KEY";
    int embedding_dim = 1536;
    int timeout_seconds = 120;
};

/// Thin adapter over the vendor HTTP API. Out of contract scope for
/// offline tests; used by the CLI when a real backend is configured.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(HttpProviderSettings settings);

    CompletionResult complete(const CompletionRequest& request) override;
    std::vector<float> embed(const std::string& text) override;
    int dim() const override { return settings_.embedding_dim; }

private:
    std::string post_json(const std::string& path, const std::string& body);

    HttpProviderSettings settings_;
    std::string api_key_;
    std::string host_;
    std::string path_prefix_;
    bool https_ = false;
};

}  // namespace foamforge::llm
