#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace foamforge::prompts {

/// One template from the pack: system and user text with {name} slots.
/// Doubled braces escape literals. required_slots is derived by scanning
/// both texts, so every slot in the text is required by construction.
struct PromptTemplate {
    std::string template_id;
    std::string system_text;
    std::string user_text;
    std::set<std::string> required_slots;
};

struct RenderedPrompt {
    std::string system_prompt;
    std::string user_prompt;
};

/// Loads the template pack from a directory of <template_id>.txt files,
/// each with <<<SYSTEM>>> and <<<USER>>> section markers. Read-only after
/// load; safe to share across threads.
class PromptLibrary {
public:
    static PromptLibrary load(const std::filesystem::path& dir);

    /// Loads from FOAMFORGE_DATA_DIR/prompts (env var), falling back to
    /// the compiled-in data directory.
    static PromptLibrary load_default();

    const PromptTemplate& get(const std::string& template_id) const;
    bool has(const std::string& template_id) const;
    std::vector<std::string> ids() const;

    /// Substitutes slot values; the result contains no unresolved slot
    /// markers. Throws UnknownTemplate / MissingSlot. Extra slots are
    /// ignored so callers can share slot maps across templates.
    RenderedPrompt render(const std::string& template_id,
                          const std::map<std::string, std::string>& slots) const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

/// Slot substitution over one text. Exposed for tests.
std::string render_text(const std::string& template_id, const std::string& text,
                        const std::map<std::string, std::string>& slots);

/// Slot names referenced by a template text.
std::set<std::string> scan_slots(const std::string& text);

/// Resolves the data directory: FOAMFORGE_DATA_DIR env var when set, else
/// the compile-time default.
std::filesystem::path default_data_dir();

}  // namespace foamforge::prompts
