#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "foamforge/core/error.hpp"
#include "foamforge/core/state_io.hpp"
#include "foamforge/dict/dict.hpp"
#include "foamforge/rag/index.hpp"

namespace fs = std::filesystem;

namespace foamforge::rag {

namespace {

bool is_case_dir(const fs::path& dir) { return fs::is_directory(dir / "system"); }

std::vector<fs::path> sorted_children(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

void list_tree(const fs::path& dir, const std::string& indent, std::ostringstream& out) {
    for (const auto& child : sorted_children(dir)) {
        if (fs::is_directory(child)) {
            out << indent << child.filename().string() << "/\n";
            list_tree(child, indent + "  ", out);
        } else {
            out << indent << child.filename().string() << "\n";
        }
    }
}

// Case content folders indexed for the details dimension.
const char* kContentFolders[] = {"0", "constant", "system"};

std::string solver_from_controldict(const std::map<std::string, std::string>& files,
                                    const fs::path& case_dir) {
    auto it = files.find("system/controlDict");
    if (it != files.end()) {
        try {
            auto tree = dict::parse(it->second, std::string("controlDict"));
            const dict::Entry* app = tree.find("application");
            if (app && !app->value.empty() &&
                app->value.front().kind == dict::Item::Kind::token) {
                return app->value.front().token;
            }
        } catch (const ParseError&) {
            // fall through to the path heuristic
        }
    }
    return case_dir.parent_path().filename().string();
}

CaseRecord make_record(const fs::path& root, const fs::path& case_dir) {
    CaseRecord rec;
    rec.case_path = fs::relative(case_dir, root).generic_string();

    std::ostringstream tree;
    tree << case_dir.filename().string() << "/\n";
    list_tree(case_dir, "  ", tree);
    rec.directory_structure = tree.str();

    for (const char* folder : kContentFolders) {
        const fs::path sub = case_dir / folder;
        if (!fs::is_directory(sub)) continue;
        for (const auto& entry : fs::recursive_directory_iterator(sub)) {
            if (!entry.is_regular_file()) continue;
            const std::string rel = fs::relative(entry.path(), case_dir).generic_string();
            rec.file_contents[rel] = core::read_text_file(entry.path());
        }
    }

    if (fs::is_regular_file(case_dir / "Allrun")) {
        rec.execution_script = core::read_text_file(case_dir / "Allrun");
    }

    // Metadata from the corpus layout <domain>/.../<category>/<case>,
    // with the solver taken from controlDict when parseable.
    std::vector<std::string> segments;
    for (const auto& part : fs::relative(case_dir, root)) {
        segments.push_back(part.string());
    }
    rec.metadata.case_name = case_dir.filename().string();
    rec.metadata.case_domain = segments.size() >= 2 ? segments.front() : "general";
    rec.metadata.case_category =
        segments.size() >= 2 ? segments[segments.size() - 2] : rec.metadata.case_domain;
    rec.metadata.case_solver = solver_from_controldict(rec.file_contents, case_dir);
    return rec;
}

void find_cases(const fs::path& root, const fs::path& dir, std::vector<CaseRecord>& out) {
    if (is_case_dir(dir)) {
        out.push_back(make_record(root, dir));
        return;  // cases do not nest
    }
    for (const auto& child : sorted_children(dir)) {
        if (fs::is_directory(child)) find_cases(root, child, out);
    }
}

}  // namespace

std::vector<CaseRecord> ingest_corpus(const fs::path& root) {
    if (!fs::is_directory(root)) throw EmptyCorpus("corpus root not found: " + root.string());
    std::vector<CaseRecord> records;
    find_cases(root, root, records);
    if (records.empty()) {
        throw EmptyCorpus("no case directories under " + root.string() +
                          " (a case is a directory containing system/)");
    }
    std::sort(records.begin(), records.end(),
              [](const CaseRecord& a, const CaseRecord& b) { return a.case_path < b.case_path; });
    return records;
}

std::string normalize_for_embedding(const std::string& text) {
    std::string out;
    out.reserve(text.size() + text.size() / 8);
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        // camelCase boundary: split solver/utility names such as
        // blockMesh -> block mesh.
        if (std::isupper(static_cast<unsigned char>(c)) && i > 0 &&
            std::islower(static_cast<unsigned char>(text[i - 1]))) {
            out += ' ';
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    // Unit-token normalization: m2/s -> m^2/s, m3 -> m^3, s2 -> s^2.
    std::string norm;
    norm.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        norm += out[i];
        if ((out[i] == 'm' || out[i] == 's') && i + 1 < out.size() &&
            (out[i + 1] == '2' || out[i + 1] == '3')) {
            const bool start_ok = i == 0 || !std::isalnum(static_cast<unsigned char>(out[i - 1]));
            const bool end_ok = i + 2 >= out.size() ||
                                !std::isalnum(static_cast<unsigned char>(out[i + 2]));
            if (start_ok && end_ok) norm += '^';
        }
    }
    return norm;
}

std::vector<CommandDoc> load_command_docs(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open command documentation corpus: " + file.string());
    std::vector<CommandDoc> docs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        CommandDoc doc;
        doc.name = line.substr(0, colon);
        std::size_t start = colon + 1;
        while (start < line.size() && line[start] == ' ') ++start;
        doc.help = line.substr(start);
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace foamforge::rag
