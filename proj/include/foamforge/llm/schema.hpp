#pragma once

#include <map>
#include <string>
#include <vector>

#include "foamforge/llm/provider.hpp"
#include "json.hpp"

namespace foamforge::llm {

/// Validates a document against a small JSON-schema subset: type checks
/// for object/array/string/integer/number/boolean, required properties,
/// additionalProperties, items, minItems, and enum. Returns one message
/// per violation; empty means valid.
std::vector<std::string> validate_schema(const nlohmann::json& schema,
                                         const nlohmann::json& doc,
                                         const std::string& path = "$");

class SchemaRegistry {
public:
    void add(const std::string& id, nlohmann::json schema);
    const nlohmann::json& get(const std::string& id) const;
    bool has(const std::string& id) const;

    /// Registry preloaded with the structured payloads the agents
    /// exchange: case_descriptor, subtasks, foamfile_list.
    static SchemaRegistry with_builtins();

private:
    std::map<std::string, nlohmann::json> schemas_;
};

/// Strips markdown code fences (``` or ```json) around a payload; returns
/// the trimmed inner text, or the trimmed input when unfenced.
std::string strip_code_fences(const std::string& text);

/// Completes the request and parses + validates the response against the
/// schema. On a malformed or invalid response, re-prompts once with the
/// validation error appended, then throws SchemaViolation. Never returns
/// a document that violates the schema.
nlohmann::json complete_structured(Provider& provider,
                                   const CompletionRequest& request,
                                   const nlohmann::json& schema);

}  // namespace foamforge::llm
