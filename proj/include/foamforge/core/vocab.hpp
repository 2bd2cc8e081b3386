#pragma once

#include <filesystem>
#include <set>
#include <string>

#include "foamforge/core/types.hpp"

namespace foamforge::core {

/// Closed vocabularies for descriptor validation, loaded from the vocab
/// file shipped with the data directory (vocab.json).
struct VocabularySets {
    std::set<std::string> domains;
    std::set<std::string> categories;
    std::set<std::string> solvers;

    static VocabularySets load(const std::filesystem::path& vocab_file);

    /// Formats one vocabulary as a bracketed list, e.g. ['a', 'b'], for
    /// insertion into the case-description prompt.
    static std::string format_options(const std::set<std::string>& values);
};

/// Checks every vocabulary-constrained field for membership and the case
/// name for filesystem safety. Throws UnknownVocabularyTerm or
/// ValidationError; returns the descriptor unchanged when valid.
CaseDescriptor validate_descriptor(const CaseDescriptor& raw, const VocabularySets& vocab);

}  // namespace foamforge::core
