#include "foamforge/core/vocab.hpp"

#include <fstream>

#include "foamforge/core/error.hpp"
#include "json.hpp"

namespace foamforge::core {

VocabularySets VocabularySets::load(const std::filesystem::path& vocab_file) {
    std::ifstream in(vocab_file);
    if (!in) throw ConfigError("cannot open vocabulary file: " + vocab_file.string());

    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed vocabulary file " + vocab_file.string() + ": " + e.what());
    }

    VocabularySets vocab;
    auto read_set = [&](const char* key, std::set<std::string>& out) {
        if (!doc.contains(key) || !doc[key].is_array())
            throw ConfigError(std::string("vocabulary file missing array: ") + key);
        for (const auto& v : doc[key]) out.insert(v.get<std::string>());
        if (out.empty()) throw ConfigError(std::string("vocabulary set is empty: ") + key);
    };
    read_set("case_domain", vocab.domains);
    read_set("case_category", vocab.categories);
    read_set("case_solver", vocab.solvers);
    return vocab;
}

std::string VocabularySets::format_options(const std::set<std::string>& values) {
    std::string out = "[";
    bool first = true;
    for (const auto& v : values) {
        if (!first) out += ", ";
        out += "'" + v + "'";
        first = false;
    }
    out += "]";
    return out;
}

namespace {

bool filesystem_safe(const std::string& name) {
    if (name.empty()) return false;
    if (name == "." || name == "..") return false;
    for (char c : name) {
        if (c == '/' || c == '\\' || c == '\0') return false;
    }
    return true;
}

}  // namespace

CaseDescriptor validate_descriptor(const CaseDescriptor& raw, const VocabularySets& vocab) {
    if (vocab.domains.empty() || vocab.categories.empty() || vocab.solvers.empty())
        throw ConfigError("vocabulary sets must be nonempty");

    if (!filesystem_safe(raw.case_name))
        throw ValidationError("case_name is not filesystem-safe: '" + raw.case_name + "'");

    if (!vocab.domains.count(raw.case_domain))
        throw UnknownVocabularyTerm("case_domain", raw.case_domain);
    if (!vocab.categories.count(raw.case_category))
        throw UnknownVocabularyTerm("case_category", raw.case_category);
    if (!vocab.solvers.count(raw.case_solver))
        throw UnknownVocabularyTerm("case_solver", raw.case_solver);

    return raw;
}

}  // namespace foamforge::core
