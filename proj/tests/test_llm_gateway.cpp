#include <set>

#include "doctest.h"
#include "foamforge/core/error.hpp"
#include "foamforge/llm/schema.hpp"
#include "foamforge/llm/scripted.hpp"
#include "support/helpers.hpp"

using namespace foamforge;
using nlohmann::json;

TEST_SUITE("llm-gateway") {

TEST_CASE("complete_structured: plain subtasks payload") {
    llm::ScriptedProvider provider(
        {R"({"subtasks":[{"file_name":"controlDict","folder_name":"system"}]})"});
    auto schema = llm::SchemaRegistry::with_builtins().get("subtasks");
    auto doc = llm::complete_structured(provider, {"sys", "user", 0.0}, schema);
    REQUIRE(doc.at("subtasks").size() == 1);
    CHECK(doc["subtasks"][0]["file_name"] == "controlDict");
    CHECK(doc["subtasks"][0]["folder_name"] == "system");
}

TEST_CASE("complete_structured: fenced payload parses identically") {
    const std::string payload =
        R"({"subtasks":[{"file_name":"controlDict","folder_name":"system"}]})";
    llm::ScriptedProvider plain({payload});
    llm::ScriptedProvider fenced({"```json\n" + payload + "\n```"});
    auto schema = llm::SchemaRegistry::with_builtins().get("subtasks");
    CHECK(llm::complete_structured(plain, {"s", "u", 0.0}, schema) ==
          llm::complete_structured(fenced, {"s", "u", 0.0}, schema));
}

TEST_CASE("complete_structured: one bounded re-prompt, then SchemaViolation") {
    llm::ScriptedProvider provider({R"({"subtasks":"oops"})", R"({"subtasks":"oops"})"});
    auto schema = llm::SchemaRegistry::with_builtins().get("subtasks");
    CHECK_THROWS_AS(llm::complete_structured(provider, {"s", "u", 0.0}, schema),
                    SchemaViolation);
    // Exactly two calls: the original and the single retry.
    CHECK(provider.calls_made() == 2);
    // The retry appended the validation error to the user prompt.
    CHECK(provider.requests()[1].user_prompt.find("failed validation") != std::string::npos);
}

TEST_CASE("complete_structured: invalid first, valid on retry") {
    const std::string good =
        R"({"subtasks":[{"file_name":"U","folder_name":"0"}]})";
    llm::ScriptedProvider provider({"not json at all", good});
    auto schema = llm::SchemaRegistry::with_builtins().get("subtasks");
    auto doc = llm::complete_structured(provider, {"s", "u", 0.0}, schema);
    CHECK(doc["subtasks"][0]["file_name"] == "U");
}

TEST_CASE("scripted provider: exhaustion raises ScriptExhausted") {
    llm::ScriptedProvider provider({"one", "two"});
    provider.complete({"s", "u", 0.0});
    provider.complete({"s", "u", 0.0});
    CHECK_THROWS_AS(provider.complete({"s", "u", 0.0}), ScriptExhausted);
}

TEST_CASE("scripted provider records requests verbatim") {
    llm::ScriptedProvider provider({"r"});
    llm::CompletionRequest req{"system text", "user text", 0.4};
    req.template_id = "case_description";
    provider.complete(req);
    REQUIRE(provider.requests().size() == 1);
    CHECK(provider.requests()[0].system_prompt == "system text");
    CHECK(provider.requests()[0].user_prompt == "user text");
    CHECK(provider.requests()[0].template_id == std::optional<std::string>("case_description"));
}

TEST_CASE("token accounting: meter total equals the sum of per-call counts") {
    llm::TokenMeter meter;
    auto inner = std::make_shared<llm::ScriptedProvider>(
        std::vector<std::string>{"a b c", "d e"});
    llm::MeteredProvider metered(inner, meter);
    auto r1 = metered.complete({"one two", "three", 0.0});
    auto r2 = metered.complete({"x", "y z", 0.0});
    CHECK(meter.total() == r1.prompt_tokens + r1.completion_tokens + r2.prompt_tokens +
                               r2.completion_tokens);
    CHECK(meter.prompt_tokens() == 3 + 3);
    CHECK(meter.completion_tokens() == 3 + 2);
}

TEST_CASE("hash embedder: identical text embeds identically; unit norm") {
    llm::HashEmbedder embedder(256);
    auto a = embedder.embed("same text");
    auto b = embedder.embed("same text");
    CHECK(a == b);
    double norm = 0;
    for (float x : a) norm += static_cast<double>(x) * x;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hash embedder: distinct fixture texts yield distinct vectors") {
    llm::HashEmbedder embedder(64);
    std::set<std::vector<float>> seen;
    for (int i = 0; i < 100; ++i) {
        auto v = embedder.embed("fixture text number " + std::to_string(i));
        CHECK(seen.insert(v).second);  // no collisions across the set
    }
}

TEST_CASE("schema validator: enum, types, required, additionalProperties") {
    json schema{{"type", "object"},
                {"required", json::array({"kind"})},
                {"additionalProperties", false},
                {"properties",
                 {{"kind", {{"enum", json::array({"a", "b"})}}},
                  {"count", {{"type", "integer"}}}}}};
    CHECK(llm::validate_schema(schema, json{{"kind", "a"}, {"count", 3}}).empty());
    CHECK(!llm::validate_schema(schema, json{{"kind", "z"}}).empty());
    CHECK(!llm::validate_schema(schema, json{{"count", 3}}).empty());
    CHECK(!llm::validate_schema(schema, json{{"kind", "a"}, {"extra", 1}}).empty());
    CHECK(!llm::validate_schema(schema, json{{"kind", "a"}, {"count", "three"}}).empty());
}

TEST_CASE("strip_code_fences handles fenced, language-tagged, and plain payloads") {
    CHECK(llm::strip_code_fences("{\"a\":1}") == "{\"a\":1}");
    CHECK(llm::strip_code_fences("```\n{\"a\":1}\n```") == "{\"a\":1}");
    CHECK(llm::strip_code_fences("```json\n{\"a\":1}\n```") == "{\"a\":1}");
    CHECK(llm::strip_code_fences("  ```python\nprint(1)\nprint(2)\n```  ") ==
          "print(1)\nprint(2)");
}

TEST_CASE("pattern provider: keyed by template, last response repeats") {
    llm::PatternProvider provider({{"file_generation", {"first", "second"}}});
    llm::CompletionRequest req{"s", "u", 0.0};
    req.template_id = "file_generation";
    CHECK(provider.complete(req).text == "first");
    CHECK(provider.complete(req).text == "second");
    CHECK(provider.complete(req).text == "second");
    llm::CompletionRequest other{"s", "u", 0.0};
    other.template_id = "unknown_kind";
    CHECK_THROWS_AS(provider.complete(other), ScriptExhausted);
}

}  // TEST_SUITE
