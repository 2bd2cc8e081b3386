#include "foamforge/llm/scripted.hpp"

#include "foamforge/core/error.hpp"

namespace foamforge::llm {

CompletionResult ScriptedProvider::complete(const CompletionRequest& request) {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
    if (next_ >= responses_.size()) {
        throw ScriptExhausted("scripted provider exhausted after " +
                              std::to_string(responses_.size()) + " responses");
    }
    const std::string& text = responses_[next_++];
    return CompletionResult{
        text,
        approx_token_count(request.system_prompt) + approx_token_count(request.user_prompt),
        approx_token_count(text),
    };
}

CompletionResult PatternProvider::complete(const CompletionRequest& request) {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
    const std::string key = request.template_id.value_or("");
    auto it = by_template_.find(key);
    if (it == by_template_.end() || it->second.empty()) {
        throw ScriptExhausted("pattern provider has no responses for template '" + key + "'");
    }
    std::size_t& cur = cursor_[key];
    const std::string& text = it->second[std::min(cur, it->second.size() - 1)];
    ++cur;
    return CompletionResult{
        text,
        approx_token_count(request.system_prompt) + approx_token_count(request.user_prompt),
        approx_token_count(text),
    };
}

}  // namespace foamforge::llm
