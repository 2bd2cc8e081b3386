#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "foamforge/core/error.hpp"
#include "foamforge/core/order.hpp"
#include "foamforge/core/state_io.hpp"
#include "foamforge/core/vocab.hpp"
#include "support/helpers.hpp"

using namespace foamforge;
using core::PlannedFile;
using core::SimulationPlan;

namespace {

PlannedFile pf(std::string name, std::string folder, std::vector<std::string> deps = {},
               int priority = 0) {
    PlannedFile f;
    f.file_name = std::move(name);
    f.folder_name = std::move(folder);
    f.dependencies = std::move(deps);
    f.priority = priority;
    return f;
}

// Independent validity checker for an ordering of plan.files.
bool valid_topological_order(const SimulationPlan& plan,
                             const std::vector<PlannedFile>& order) {
    if (order.size() != plan.files.size()) return false;
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < order.size(); ++i) position[order[i].identifier()] = i;
    if (position.size() != plan.files.size()) return false;  // permutation check
    for (const auto& f : plan.files) {
        if (!position.count(f.identifier())) return false;
        for (const auto& dep : f.dependencies) {
            if (position.at(dep) >= position.at(f.identifier())) return false;
        }
    }
    return true;
}

// Brute-force oracle: enumerate every permutation, keep valid topological
// orders, and return the lexicographically smallest key sequence, where a
// file's key is (folder rank, plan index).
std::vector<PlannedFile> brute_force_canonical_order(const SimulationPlan& plan) {
    const std::size_t n = plan.files.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    auto key_of = [&](const std::vector<std::size_t>& p) {
        std::vector<std::pair<int, int>> key;
        for (auto idx : p) {
            key.emplace_back(core::folder_rank(plan.files[idx].folder_name),
                             static_cast<int>(idx));
        }
        return key;
    };

    std::vector<std::size_t> best;
    std::vector<std::pair<int, int>> best_key;
    do {
        std::vector<PlannedFile> candidate;
        for (auto idx : perm) candidate.push_back(plan.files[idx]);
        if (!valid_topological_order(plan, candidate)) continue;
        auto key = key_of(perm);
        if (best.empty() || key < best_key) {
            best = perm;
            best_key = key;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<PlannedFile> out;
    for (auto idx : best) out.push_back(plan.files[idx]);
    return out;
}

SimulationPlan random_acyclic_plan(std::mt19937& rng) {
    const char* folders[] = {"system", "constant", "0", ""};
    std::uniform_int_distribution<int> size_dist(1, 10);
    std::uniform_int_distribution<int> folder_dist(0, 3);
    std::bernoulli_distribution edge(0.3);

    SimulationPlan plan;
    const int n = size_dist(rng);
    for (int i = 0; i < n; ++i) {
        plan.files.push_back(pf("file" + std::to_string(i), folders[folder_dist(rng)], {}, i));
    }
    // Edges only from later files to earlier ones keeps the plan acyclic.
    for (int i = 1; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            if (edge(rng)) {
                plan.files[static_cast<std::size_t>(i)].dependencies.push_back(
                    plan.files[static_cast<std::size_t>(j)].identifier());
            }
        }
    }
    return plan;
}

}  // namespace

TEST_SUITE("case-model") {

TEST_CASE("validate_descriptor accepts vocabulary members") {
    const auto& vocab = fftest::TestEnv::get().vocab;
    core::CaseDescriptor d{"cavity", "incompressible", "laminar flow", "icoFoam"};
    CHECK(core::validate_descriptor(d, vocab) == d);
}

TEST_CASE("validate_descriptor rejects out-of-vocabulary solver") {
    const auto& vocab = fftest::TestEnv::get().vocab;
    core::CaseDescriptor d{"cavity", "incompressible", "laminar flow", "magicFoam"};
    CHECK_THROWS_AS(core::validate_descriptor(d, vocab), UnknownVocabularyTerm);
    try {
        core::validate_descriptor(d, vocab);
    } catch (const UnknownVocabularyTerm& e) {
        CHECK(e.field == "case_solver");
        CHECK(e.value == "magicFoam");
    }
}

TEST_CASE("validate_descriptor rejects path separators in the case name") {
    const auto& vocab = fftest::TestEnv::get().vocab;
    core::CaseDescriptor d{"a/b", "incompressible", "laminar flow", "icoFoam"};
    CHECK_THROWS_AS(core::validate_descriptor(d, vocab), ValidationError);
}

TEST_CASE("generation_order: folder precedence without explicit deps") {
    SimulationPlan plan;
    plan.files = {pf("U", "0"), pf("transportProperties", "constant"),
                  pf("controlDict", "system"), pf("p", "0"), pf("fvSchemes", "system")};
    auto order = core::generation_order(plan, true);
    std::vector<std::string> ids;
    for (const auto& f : order) ids.push_back(f.identifier());
    CHECK(ids == std::vector<std::string>{"system/controlDict", "system/fvSchemes",
                                          "constant/transportProperties", "0/U", "0/p"});
}

TEST_CASE("generation_order: single file") {
    SimulationPlan plan;
    plan.files = {pf("controlDict", "system")};
    auto order = core::generation_order(plan, true);
    REQUIRE(order.size() == 1);
    CHECK(order.front().file_name == "controlDict");
}

TEST_CASE("generation_order: explicit cycle raises CyclicDependency") {
    SimulationPlan plan;
    plan.files = {pf("A", "system", {"system/B"}), pf("B", "system", {"system/A"})};
    CHECK_THROWS_AS(core::generation_order(plan, true), CyclicDependency);
    try {
        core::generation_order(plan, true);
    } catch (const CyclicDependency& e) {
        CHECK(e.cycle.size() >= 2);  // the listing names the cycle members
        CHECK(std::count(e.cycle.begin(), e.cycle.end(), "system/A") >= 1);
        CHECK(std::count(e.cycle.begin(), e.cycle.end(), "system/B") >= 1);
    }
}

TEST_CASE("generation_order: 6-file mixed-deps plan equals the brute-force oracle") {
    SimulationPlan plan;
    plan.files = {
        pf("U", "0", {"constant/transportProperties"}, 0),
        pf("controlDict", "system", {}, 1),
        pf("transportProperties", "constant", {"system/fvSchemes"}, 2),
        pf("fvSchemes", "system", {}, 3),
        pf("p", "0", {"0/U"}, 4),
        pf("Allrun", "", {}, 5),
    };

    auto expected = brute_force_canonical_order(plan);
    auto actual = core::generation_order(plan, true);
    CHECK(actual == expected);

    // Frozen expected sequence, computed by the oracle above.
    std::vector<std::string> ids;
    for (const auto& f : actual) ids.push_back(f.identifier());
    CHECK(ids == std::vector<std::string>{"system/controlDict", "system/fvSchemes",
                                          "constant/transportProperties", "0/U", "0/p",
                                          "Allrun"});
}

TEST_CASE("generation_order: disabled mode returns plan order unchanged") {
    SimulationPlan plan;
    plan.files = {pf("U", "0"), pf("controlDict", "system"), pf("Allrun", "")};
    auto order = core::generation_order(plan, false);
    CHECK(order == plan.files);
}

TEST_CASE("generation_order property: permutation, dependency, and folder laws") {
    std::mt19937 rng(20240817);
    for (int sample = 0; sample < 100; ++sample) {
        SimulationPlan plan = random_acyclic_plan(rng);
        auto order = core::generation_order(plan, true);

        CHECK(valid_topological_order(plan, order));

        // Folder precedence holds for adjacent pairs unless a dependency
        // forces the inversion (the later file must then be a transitive
        // dependency barrier; verify the weaker adjacent-pair law: an
        // inversion implies some dependency of an emitted-later file was
        // only satisfied after the earlier one).
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            const int r1 = core::folder_rank(order[i].folder_name);
            const int r2 = core::folder_rank(order[i + 1].folder_name);
            if (r1 > r2) {
                // The only legal reason: the next file depends (directly)
                // on something at or after position i in the order.
                bool forced = false;
                std::map<std::string, std::size_t> position;
                for (std::size_t k = 0; k < order.size(); ++k) {
                    position[order[k].identifier()] = k;
                }
                for (const auto& dep : order[i + 1].dependencies) {
                    if (position.at(dep) >= i) forced = true;
                }
                CHECK(forced);
            }
        }
    }
}

TEST_CASE("duplicate (file, folder) pairs are rejected") {
    SimulationPlan plan;
    plan.files = {pf("U", "0"), pf("U", "0")};
    CHECK_THROWS_AS(core::validate_plan(plan), ValidationError);
}

TEST_CASE("dangling dependencies are rejected") {
    SimulationPlan plan;
    plan.files = {pf("U", "0", {"system/doesNotExist"})};
    CHECK_THROWS_AS(core::validate_plan(plan), ValidationError);
}

TEST_CASE("CaseState JSON round-trip is lossless") {
    core::CaseState s;
    s.case_id = "case-42";
    s.user_requirement = "Do a cavity flow.\nWith two lines.";
    s.descriptor = {"cavity", "incompressible", "laminar flow", "icoFoam"};
    s.plan.files = {pf("controlDict", "system", {}, 0), pf("U", "0", {"system/controlDict"}, 1)};
    s.plan.source_reference = "cavity0";
    s.foamfiles = {{"controlDict", "system", "application icoFoam;\n"},
                   {"Allrun", "", "#!/bin/sh\nrunApplication icoFoam\n"}};
    s.execution_logs = "=== log.icoFoam ===\nEnd\n";
    s.run_status = core::RunStatus::failure;
    s.history = {{1, {{"controlDict", "system", "old"}}, "boom", "analysis text"}};
    s.loop_count = 3;
    s.token_usage = 123456;

    auto round_tripped = core::state_from_json(core::state_to_json(s));
    CHECK(round_tripped == s);
}

TEST_CASE("workspace persists and reloads state; materializes files verbatim") {
    fftest::TempDir tmp;
    core::Workspace ws(tmp.path);

    core::CaseState s;
    s.case_id = "case-ws";
    s.user_requirement = "req";
    s.foamfiles = {{"controlDict", "system", "application icoFoam;\n"},
                   {"Allrun", "", "#!/bin/sh\necho run\n"}};
    ws.save_state(s);
    ws.materialize(s);

    CHECK(ws.load_state("case-ws") == s);
    CHECK(core::read_text_file(tmp.path / "case-ws" / "case" / "system" / "controlDict") ==
          "application icoFoam;\n");
    const auto allrun = tmp.path / "case-ws" / "case" / "Allrun";
    CHECK(core::read_text_file(allrun) == "#!/bin/sh\necho run\n");
    auto perms = std::filesystem::status(allrun).permissions();
    CHECK((perms & std::filesystem::perms::owner_exec) != std::filesystem::perms::none);

    CHECK_THROWS_AS(ws.load_state("nope"), UnknownCase);
}

TEST_CASE("config validation bounds") {
    core::Config config;
    CHECK_NOTHROW(config.validate());
    config.max_loops = 0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config = {};
    config.temperature = 1.5;
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

}  // TEST_SUITE
