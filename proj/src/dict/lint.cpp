#include "foamforge/dict/lint.hpp"

#include <functional>
#include <map>

#include "foamforge/core/error.hpp"

namespace foamforge::dict {

std::string inconsistency_kind_name(InconsistencyKind k) {
    switch (k) {
        case InconsistencyKind::missing_field_reference: return "missing_field_reference";
        case InconsistencyKind::dimension_mismatch: return "dimension_mismatch";
        case InconsistencyKind::solver_mismatch: return "solver_mismatch";
        case InconsistencyKind::boundary_patch_mismatch: return "boundary_patch_mismatch";
    }
    return "unknown";
}

namespace {

using core::FoamFile;

void walk_items(const std::vector<Item>& items,
                const std::function<void(const Item&)>& fn);

void walk_entries(const std::vector<Entry>& entries,
                  const std::function<void(const Item&)>& fn) {
    for (const auto& e : entries) walk_items(e.value, fn);
}

void walk_items(const std::vector<Item>& items,
                const std::function<void(const Item&)>& fn) {
    for (const auto& item : items) {
        fn(item);
        if (item.kind == Item::Kind::list) walk_items(item.items, fn);
        if (item.kind == Item::Kind::dict) walk_entries(item.entries, fn);
    }
}

void collect_keywords(const std::vector<Entry>& entries, std::set<std::string>& out) {
    for (const auto& e : entries) {
        out.insert(e.keyword);
        for (const auto& item : e.value) {
            if (item.kind == Item::Kind::dict) collect_keywords(item.entries, out);
        }
    }
}

// Patch names declared by a blockMeshDict `boundary` list: word tokens
// immediately followed by an anonymous dict.
void boundary_names_from_blockmesh(const DictionaryTree& tree, std::set<std::string>& out) {
    const Entry* boundary = tree.find("boundary");
    if (!boundary || boundary->value.empty()) return;
    for (const auto& item : boundary->value) {
        if (item.kind != Item::Kind::list) continue;
        for (std::size_t i = 0; i + 1 < item.items.size(); ++i) {
            if (item.items[i].kind == Item::Kind::token &&
                item.items[i + 1].kind == Item::Kind::dict) {
                out.insert(item.items[i].token);
            }
        }
    }
}

bool is_wildcard_patch(const std::string& name) {
    // Quoted keys are regexes in OpenFOAM ("(inlet|outlet)", ".*").
    return !name.empty() && name.front() == '"';
}

std::string strip_macro_name(const std::string& token) {
    std::string name = token.substr(1);
    if (!name.empty() && name.front() == '{' && name.back() == '}') {
        name = name.substr(1, name.size() - 2);
    }
    // Scoped references like $!top/sub or $:a.b: compare the last segment.
    auto pos = name.find_last_of("/:.!");
    if (pos != std::string::npos) name = name.substr(pos + 1);
    return name;
}

}  // namespace

LintReport lint_case(const std::vector<FoamFile>& files,
                     const core::CaseDescriptor& descriptor,
                     const std::set<std::string>& known_boundaries) {
    LintReport report;

    std::map<std::string, DictionaryTree> parsed;  // identifier -> tree
    std::vector<std::string> order;
    for (const auto& f : files) {
        // Allrun and other scripts are not dictionaries.
        if (f.folder_name.empty()) continue;
        try {
            parsed.emplace(f.identifier(), parse(f.content, f.file_name));
            order.push_back(f.identifier());
        } catch (const ParseError& e) {
            report.parse_failures.push_back({f.identifier(), e.what()});
        }
    }

    // Per-file rules, in file order.
    for (const auto& id : order) {
        const auto& tree = parsed.at(id);

        walk_entries(tree.entries, [&](const Item& item) {
            if (item.kind == Item::Kind::dims && item.dims.size() != 7) {
                report.issues.push_back(
                    {InconsistencyKind::dimension_mismatch,
                     "dimension set has " + std::to_string(item.dims.size()) +
                         " components, expected 7",
                     {id}});
            }
        });

        std::set<std::string> keywords;
        collect_keywords(tree.entries, keywords);
        walk_entries(tree.entries, [&](const Item& item) {
            if (item.kind != Item::Kind::token || item.token.empty() || item.token[0] != '$')
                return;
            const std::string name = strip_macro_name(item.token);
            if (!name.empty() && !keywords.count(name)) {
                report.issues.push_back({InconsistencyKind::missing_field_reference,
                                         "macro " + item.token + " has no matching entry",
                                         {id}});
            }
        });
    }

    // Solver consistency: controlDict application vs. descriptor.
    if (!descriptor.case_solver.empty()) {
        auto it = parsed.find("system/controlDict");
        if (it != parsed.end()) {
            const Entry* app = it->second.find("application");
            if (app && app->kind == Entry::Kind::value && app->value.size() == 1 &&
                app->value.front().kind == Item::Kind::token &&
                app->value.front().token != descriptor.case_solver) {
                report.issues.push_back({InconsistencyKind::solver_mismatch,
                                         "controlDict application '" +
                                             app->value.front().token +
                                             "' does not match case solver '" +
                                             descriptor.case_solver + "'",
                                         {"system/controlDict"}});
            }
        }
    }

    // Boundary patch consistency: available boundary set = explicit names
    // plus anything declared by blockMeshDict.
    std::set<std::string> boundaries = known_boundaries;
    if (auto it = parsed.find("system/blockMeshDict"); it != parsed.end()) {
        boundary_names_from_blockmesh(it->second, boundaries);
    }
    if (!boundaries.empty()) {
        for (const auto& id : order) {
            if (id.rfind("0/", 0) != 0) continue;
            const auto* bf = parsed.at(id).find_block({"boundaryField"});
            if (!bf) continue;
            for (const auto& e : *bf) {
                if (e.kind == Entry::Kind::directive) continue;
                if (is_wildcard_patch(e.keyword)) continue;
                if (!boundaries.count(e.keyword)) {
                    report.issues.push_back({InconsistencyKind::boundary_patch_mismatch,
                                             "patch '" + e.keyword +
                                                 "' is not in the mesh boundary set",
                                             {id}});
                }
            }
        }
    }

    return report;
}

}  // namespace foamforge::dict
