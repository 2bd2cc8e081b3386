#include "foamforge/llm/schema.hpp"

#include "foamforge/core/error.hpp"

using nlohmann::json;

namespace foamforge::llm {

namespace {

std::string type_name(const json& v) {
    if (v.is_object()) return "object";
    if (v.is_array()) return "array";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
    if (v.is_number()) return "number";
    if (v.is_null()) return "null";
    return "unknown";
}

bool type_matches(const std::string& expected, const json& v) {
    if (expected == "number") return v.is_number();
    if (expected == "integer") return v.is_number_integer() || v.is_number_unsigned();
    return type_name(v) == expected;
}

}  // namespace

std::vector<std::string> validate_schema(const json& schema, const json& doc,
                                         const std::string& path) {
    std::vector<std::string> errors;

    if (schema.contains("enum")) {
        for (const auto& allowed : schema["enum"]) {
            if (doc == allowed) return errors;
        }
        errors.push_back(path + ": value not in enum");
        return errors;
    }

    if (schema.contains("type")) {
        const std::string expected = schema["type"].get<std::string>();
        if (!type_matches(expected, doc)) {
            errors.push_back(path + ": expected " + expected + ", got " + type_name(doc));
            return errors;
        }
        if (expected == "object") {
            const json props =
                schema.contains("properties") ? schema["properties"] : json::object();
            if (schema.contains("required")) {
                for (const auto& req : schema["required"]) {
                    if (!doc.contains(req.get<std::string>())) {
                        errors.push_back(path + ": missing required property '" +
                                         req.get<std::string>() + "'");
                    }
                }
            }
            for (auto it = doc.begin(); it != doc.end(); ++it) {
                if (props.contains(it.key())) {
                    auto sub = validate_schema(props[it.key()], it.value(),
                                               path + "." + it.key());
                    errors.insert(errors.end(), sub.begin(), sub.end());
                } else if (schema.value("additionalProperties", true) == false) {
                    errors.push_back(path + ": unexpected property '" + it.key() + "'");
                }
            }
        } else if (expected == "array") {
            if (schema.contains("minItems") &&
                doc.size() < schema["minItems"].get<std::size_t>()) {
                errors.push_back(path + ": expected at least " +
                                 schema["minItems"].dump() + " items");
            }
            if (schema.contains("items")) {
                for (std::size_t i = 0; i < doc.size(); ++i) {
                    auto sub = validate_schema(schema["items"], doc[i],
                                               path + "[" + std::to_string(i) + "]");
                    errors.insert(errors.end(), sub.begin(), sub.end());
                }
            }
        }
    }

    return errors;
}

void SchemaRegistry::add(const std::string& id, json schema) {
    schemas_[id] = std::move(schema);
}

const json& SchemaRegistry::get(const std::string& id) const {
    auto it = schemas_.find(id);
    if (it == schemas_.end()) throw ConfigError("schema not registered: " + id);
    return it->second;
}

bool SchemaRegistry::has(const std::string& id) const { return schemas_.count(id) > 0; }

SchemaRegistry SchemaRegistry::with_builtins() {
    SchemaRegistry reg;

    reg.add("case_descriptor", json{
        {"type", "object"},
        {"required", json::array({"case_name", "case_domain", "case_category", "case_solver"})},
        {"properties",
         {{"case_name", {{"type", "string"}}},
          {"case_domain", {{"type", "string"}}},
          {"case_category", {{"type", "string"}}},
          {"case_solver", {{"type", "string"}}}}},
    });

    reg.add("subtasks", json{
        {"type", "object"},
        {"required", json::array({"subtasks"})},
        {"properties",
         {{"subtasks",
           {{"type", "array"},
            {"items",
             {{"type", "object"},
              {"required", json::array({"file_name", "folder_name"})},
              {"properties",
               {{"file_name", {{"type", "string"}}},
                {"folder_name", {{"type", "string"}}}}}}}}}}},
    });

    reg.add("foamfile_list", json{
        {"type", "object"},
        {"required", json::array({"foamfile"})},
        {"properties",
         {{"foamfile",
           {{"type", "array"},
            {"items",
             {{"type", "object"},
              {"required", json::array({"file_name", "folder_name", "content"})},
              {"properties",
               {{"file_name", {{"type", "string"}}},
                {"folder_name", {{"type", "string"}}},
                {"content", {{"type", "string"}}}}}}}}}}},
    });

    return reg;
}

std::string strip_code_fences(const std::string& text) {
    auto trim = [](std::string s) {
        const char* ws = " \t\r\n";
        auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };

    std::string t = trim(text);
    auto open = t.find("```");
    if (open == std::string::npos) return t;
    auto body_start = t.find('\n', open);
    if (body_start == std::string::npos) return t;
    auto close = t.rfind("```");
    if (close == std::string::npos || close <= body_start) return t;
    return trim(t.substr(body_start + 1, close - body_start - 1));
}

json complete_structured(Provider& provider, const CompletionRequest& request,
                         const json& schema) {
    auto attempt = [&](const CompletionRequest& req) -> std::pair<json, std::string> {
        CompletionResult result = provider.complete(req);
        const std::string payload = strip_code_fences(result.text);
        json doc;
        try {
            doc = json::parse(payload);
        } catch (const json::exception& e) {
            return {json(), std::string("response is not valid JSON: ") + e.what()};
        }
        auto errors = validate_schema(schema, doc);
        if (!errors.empty()) {
            std::string msg;
            for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
            return {json(), msg};
        }
        return {doc, ""};
    };

    auto [doc, error] = attempt(request);
    if (error.empty()) return doc;

    CompletionRequest retry = request;
    retry.user_prompt += "\n\nYour previous response failed validation: " + error +
                         "\nRespond again with JSON that strictly matches the required schema.";
    auto [doc2, error2] = attempt(retry);
    if (error2.empty()) return doc2;

    throw SchemaViolation("structured output failed validation after retry: " + error2);
}

}  // namespace foamforge::llm
