#include "foamforge/prompts/library.hpp"

#include <cstdlib>
#include <fstream>

#include "foamforge/core/error.hpp"
#include "foamforge/core/state_io.hpp"

namespace fs = std::filesystem;

namespace foamforge::prompts {

namespace {

constexpr const char* kSystemMarker = "<<<SYSTEM>>>";
constexpr const char* kUserMarker = "<<<USER>>>";

// Splits the template file into system and user sections. Section text is
// the lines between markers joined with \n, without a trailing newline.
std::pair<std::string, std::string> split_sections(const std::string& raw,
                                                   const std::string& file) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : raw) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);

    std::string system_text, user_text;
    enum { none, in_system, in_user } section = none;
    bool first = true;
    auto append = [&](std::string& dst, const std::string& line) {
        if (!first) dst += "\n";
        dst += line;
        first = false;
    };
    for (const auto& line : lines) {
        if (line == kSystemMarker) {
            section = in_system;
            first = true;
        } else if (line == kUserMarker) {
            section = in_user;
            first = true;
        } else if (section == in_system) {
            append(system_text, line);
        } else if (section == in_user) {
            append(user_text, line);
        } else {
            throw ConfigError("template file " + file + " has content before a section marker");
        }
    }
    return {system_text, user_text};
}

}  // namespace

std::set<std::string> scan_slots(const std::string& text) {
    std::set<std::string> slots;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '{') {
            if (i + 1 < text.size() && text[i + 1] == '{') {
                ++i;
                continue;
            }
            auto close = text.find('}', i + 1);
            if (close != std::string::npos) {
                slots.insert(text.substr(i + 1, close - i - 1));
                i = close;
            }
        } else if (text[i] == '}') {
            if (i + 1 < text.size() && text[i + 1] == '}') ++i;
        }
    }
    return slots;
}

std::string render_text(const std::string& template_id, const std::string& text,
                        const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '{') {
            if (i + 1 < text.size() && text[i + 1] == '{') {
                out += '{';
                ++i;
                continue;
            }
            auto close = text.find('}', i + 1);
            if (close == std::string::npos) {
                out += c;
                continue;
            }
            const std::string name = text.substr(i + 1, close - i - 1);
            auto it = slots.find(name);
            if (it == slots.end()) throw MissingSlot(template_id, name);
            out += it->second;
            i = close;
        } else if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
            out += '}';
            ++i;
        } else {
            out += c;
        }
    }
    return out;
}

PromptLibrary PromptLibrary::load(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw ConfigError("prompt template directory not found: " + dir.string());
    }
    PromptLibrary lib;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        PromptTemplate t;
        t.template_id = path.stem().string();
        auto [system_text, user_text] =
            split_sections(core::read_text_file(path), path.string());
        t.system_text = std::move(system_text);
        t.user_text = std::move(user_text);
        for (const auto& s : scan_slots(t.system_text)) t.required_slots.insert(s);
        for (const auto& s : scan_slots(t.user_text)) t.required_slots.insert(s);
        lib.templates_[t.template_id] = std::move(t);
    }
    if (lib.templates_.empty()) {
        throw ConfigError("prompt template directory is empty: " + dir.string());
    }
    return lib;
}

fs::path default_data_dir() {
    if (const char* env = std::getenv("FOAMFORGE_DATA_DIR")) return fs::path(env);
#ifdef FOAMFORGE_DATA_DIR_DEFAULT
    return fs::path(FOAMFORGE_DATA_DIR_DEFAULT);
#else
    return fs::path("data");
#endif
}

PromptLibrary PromptLibrary::load_default() { return load(default_data_dir() / "prompts"); }

const PromptTemplate& PromptLibrary::get(const std::string& template_id) const {
    auto it = templates_.find(template_id);
    if (it == templates_.end()) throw UnknownTemplate(template_id);
    return it->second;
}

bool PromptLibrary::has(const std::string& template_id) const {
    return templates_.count(template_id) > 0;
}

std::vector<std::string> PromptLibrary::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : templates_) out.push_back(id);
    return out;
}

RenderedPrompt PromptLibrary::render(const std::string& template_id,
                                     const std::map<std::string, std::string>& slots) const {
    const PromptTemplate& t = get(template_id);
    return RenderedPrompt{
        render_text(template_id, t.system_text, slots),
        render_text(template_id, t.user_text, slots),
    };
}

}  // namespace foamforge::prompts
