#include "foamforge/core/order.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "foamforge/core/error.hpp"

namespace foamforge::core {

namespace {

// Resolves a dependency string to a plan index. Accepts the canonical
// "<folder>/<file>" identifier and, as a fallback, a bare file name when
// it is unambiguous within the plan.
int resolve_dependency(const SimulationPlan& plan, const std::string& dep) {
    for (std::size_t i = 0; i < plan.files.size(); ++i) {
        if (plan.files[i].identifier() == dep) return static_cast<int>(i);
    }
    int found = -1;
    for (std::size_t i = 0; i < plan.files.size(); ++i) {
        if (plan.files[i].file_name == dep) {
            if (found >= 0) {
                throw ValidationError("ambiguous dependency reference: '" + dep + "'");
            }
            found = static_cast<int>(i);
        }
    }
    if (found < 0) {
        throw ValidationError("dependency references a file outside the plan: '" + dep + "'");
    }
    return found;
}

std::vector<std::string> find_cycle(const std::vector<std::vector<int>>& deps_of,
                                    const SimulationPlan& plan,
                                    const std::vector<bool>& emitted) {
    // Walk dependency edges among the unemitted remainder until a node
    // repeats; every unemitted node sits on or leads into a cycle.
    int start = -1;
    for (std::size_t i = 0; i < emitted.size(); ++i) {
        if (!emitted[i]) {
            start = static_cast<int>(i);
            break;
        }
    }
    std::vector<int> path;
    std::set<int> on_path;
    int cur = start;
    while (!on_path.count(cur)) {
        on_path.insert(cur);
        path.push_back(cur);
        for (int d : deps_of[cur]) {
            if (!emitted[d]) {
                cur = d;
                break;
            }
        }
    }
    // Trim the lead-in so the listing is exactly the cycle.
    auto it = std::find(path.begin(), path.end(), cur);
    std::vector<std::string> cycle;
    for (; it != path.end(); ++it) cycle.push_back(plan.files[*it].identifier());
    cycle.push_back(plan.files[cur].identifier());
    return cycle;
}

}  // namespace

void validate_plan(const SimulationPlan& plan) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& f : plan.files) {
        if (!seen.insert({f.folder_name, f.file_name}).second) {
            throw ValidationError("duplicate planned file: " + f.identifier());
        }
    }
    for (const auto& f : plan.files) {
        for (const auto& dep : f.dependencies) resolve_dependency(plan, dep);
    }
}

std::vector<PlannedFile> generation_order(const SimulationPlan& plan,
                                          bool file_dependency_enabled) {
    validate_plan(plan);
    if (!file_dependency_enabled) return plan.files;

    const std::size_t n = plan.files.size();
    std::vector<std::vector<int>> deps_of(n);
    std::vector<std::vector<int>> dependents_of(n);
    std::vector<int> unmet(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& dep : plan.files[i].dependencies) {
            int j = resolve_dependency(plan, dep);
            deps_of[i].push_back(j);
            dependents_of[j].push_back(static_cast<int>(i));
            ++unmet[i];
        }
    }

    // Kahn's algorithm, always emitting the available file with the
    // smallest (folder rank, plan index) key. This yields the
    // lexicographically minimal valid topological order under that key,
    // so ties within a folder preserve plan order.
    std::set<std::pair<int, int>> ready;  // (folder rank, plan index)
    for (std::size_t i = 0; i < n; ++i) {
        if (unmet[i] == 0)
            ready.insert({folder_rank(plan.files[i].folder_name), static_cast<int>(i)});
    }

    std::vector<PlannedFile> out;
    std::vector<bool> emitted(n, false);
    out.reserve(n);
    while (!ready.empty()) {
        auto [rank, idx] = *ready.begin();
        ready.erase(ready.begin());
        emitted[idx] = true;
        out.push_back(plan.files[idx]);
        for (int dep : dependents_of[idx]) {
            if (--unmet[dep] == 0)
                ready.insert({folder_rank(plan.files[dep].folder_name), dep});
        }
    }

    if (out.size() != n) throw CyclicDependency(find_cycle(deps_of, plan, emitted));
    return out;
}

}  // namespace foamforge::core
