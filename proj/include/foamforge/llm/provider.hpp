#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace foamforge::llm {

struct CompletionRequest {
    std::string system_prompt;
    std::string user_prompt;
    double temperature = 0.0;
    std::optional<std::string> schema_id;
    std::optional<std::string> template_id;  // which registered template produced this
};

struct CompletionResult {
    std::string text;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<float> embed(const std::string& text) = 0;
    virtual int dim() const = 0;
};

/// Uniform contract for completion + embedding backends. Implementations
/// must be safe for concurrent calls.
class Provider : public Embedder {
public:
    virtual CompletionResult complete(const CompletionRequest& request) = 0;
};

/// Deterministic hash-to-vector embedder: identical text maps to an
/// identical unit vector; distinct texts collide with negligible
/// probability. Used by the scripted provider and offline index builds.
class HashEmbedder : public Embedder {
public:
    explicit HashEmbedder(int dim = 1536) : dim_(dim) {}

    std::vector<float> embed(const std::string& text) override;
    int dim() const override { return dim_; }

private:
    int dim_;
};

/// Running prompt/completion token totals across a workflow.
class TokenMeter {
public:
    void add(const CompletionResult& result) {
        std::lock_guard lock(mutex_);
        prompt_ += result.prompt_tokens;
        completion_ += result.completion_tokens;
    }

    std::int64_t prompt_tokens() const { return prompt_; }
    std::int64_t completion_tokens() const { return completion_; }
    std::int64_t total() const { return prompt_ + completion_; }

private:
    mutable std::mutex mutex_;
    std::int64_t prompt_ = 0;
    std::int64_t completion_ = 0;
};

/// Decorator that records every call's token counts into a meter.
class MeteredProvider : public Provider {
public:
    MeteredProvider(std::shared_ptr<Provider> inner, TokenMeter& meter)
        : inner_(std::move(inner)), meter_(meter) {}

    CompletionResult complete(const CompletionRequest& request) override {
        CompletionResult result = inner_->complete(request);
        meter_.add(result);
        return result;
    }

    std::vector<float> embed(const std::string& text) override { return inner_->embed(text); }
    int dim() const override { return inner_->dim(); }

private:
    std::shared_ptr<Provider> inner_;
    TokenMeter& meter_;
};

/// Whitespace-chunk token approximation used by offline providers.
std::int64_t approx_token_count(const std::string& text);

}  // namespace foamforge::llm
