#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "foamforge/llm/provider.hpp"

namespace foamforge::llm {

/// Replays an ordered script of canned responses and records every
/// request verbatim for assertions. Embedding is the deterministic hash
/// embedder, so end-to-end tests are bit-deterministic.
class ScriptedProvider : public Provider {
public:
    explicit ScriptedProvider(std::vector<std::string> responses, int embedding_dim = 1536)
        : responses_(std::move(responses)), embedder_(embedding_dim) {}

    CompletionResult complete(const CompletionRequest& request) override;

    std::vector<float> embed(const std::string& text) override { return embedder_.embed(text); }
    int dim() const override { return embedder_.dim(); }

    const std::vector<CompletionRequest>& requests() const { return requests_; }
    std::size_t calls_made() const { return next_; }

private:
    std::mutex mutex_;
    std::vector<std::string> responses_;
    std::vector<CompletionRequest> requests_;
    std::size_t next_ = 0;
    HashEmbedder embedder_;
};

/// Responses keyed by template_id instead of call order, so one script
/// serves every toggle configuration of the bench matrix. Each key holds
/// an ordered list; when a list runs out its last response repeats.
class PatternProvider : public Provider {
public:
    explicit PatternProvider(std::map<std::string, std::vector<std::string>> by_template,
                             int embedding_dim = 1536)
        : by_template_(std::move(by_template)), embedder_(embedding_dim) {}

    CompletionResult complete(const CompletionRequest& request) override;

    std::vector<float> embed(const std::string& text) override { return embedder_.embed(text); }
    int dim() const override { return embedder_.dim(); }

    const std::vector<CompletionRequest>& requests() const { return requests_; }

private:
    std::mutex mutex_;
    std::map<std::string, std::vector<std::string>> by_template_;
    std::map<std::string, std::size_t> cursor_;
    std::vector<CompletionRequest> requests_;
    HashEmbedder embedder_;
};

}  // namespace foamforge::llm
