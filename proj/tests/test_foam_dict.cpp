#include <filesystem>

#include "doctest.h"
#include "foamforge/core/error.hpp"
#include "foamforge/dict/dict.hpp"
#include "foamforge/dict/lint.hpp"
#include "support/helpers.hpp"

using namespace foamforge;
using dict::DictionaryTree;
using dict::Entry;
using dict::Item;

namespace {

std::vector<std::filesystem::path> fixture_corpus() {
    std::vector<std::filesystem::path> files;
    for (const auto& entry :
         std::filesystem::directory_iterator(fftest::fixtures_dir() / "dict")) {
        if (entry.path().extension() == ".foam") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

core::FoamFile ff(std::string name, std::string folder, std::string content) {
    return core::FoamFile{std::move(name), std::move(folder), std::move(content)};
}

}  // namespace

TEST_SUITE("foam-dict") {

TEST_CASE("parse: minimal controlDict hand-trace") {
    const std::string text =
        "FoamFile { version 2.0; format ascii; class dictionary; object controlDict; }\n"
        "startTime 0;\n";
    auto tree = dict::parse(text);
    CHECK(tree.header.object == "controlDict");
    CHECK(tree.header.version == "2.0");
    CHECK(tree.header.format == "ascii");
    CHECK(tree.header.cls == "dictionary");
    REQUIRE(tree.entries.size() == 1);
    CHECK(tree.entries[0].keyword == "startTime");
    REQUIRE(tree.entries[0].value.size() == 1);
    CHECK(tree.entries[0].value[0].kind == Item::Kind::token);
    CHECK(tree.entries[0].value[0].token == "0");
}

TEST_CASE("parse: expected_name overrides header object") {
    auto tree = dict::parse("startTime 0;\n", std::string("controlDict"));
    CHECK(tree.header.object == "controlDict");
}

TEST_CASE("parse: nested boundaryField has two-level depth") {
    const std::string text =
        "boundaryField { inlet { type fixedValue; value uniform (1 0 0); } }\n";
    auto tree = dict::parse(text);
    REQUIRE(tree.entries.size() == 1);
    const Entry& bf = tree.entries[0];
    CHECK(bf.kind == Entry::Kind::block);
    const auto& level1 = bf.value.front().entries;
    REQUIRE(level1.size() == 1);
    CHECK(level1[0].keyword == "inlet");
    CHECK(level1[0].kind == Entry::Kind::block);
    const auto& level2 = level1[0].value.front().entries;
    REQUIRE(level2.size() == 2);
    CHECK(level2[0].keyword == "type");
    CHECK(level2[1].keyword == "value");
    // "uniform (1 0 0)" is a word token followed by a 3-element list.
    REQUIRE(level2[1].value.size() == 2);
    CHECK(level2[1].value[0].token == "uniform");
    CHECK(level2[1].value[1].kind == Item::Kind::list);
    CHECK(level2[1].value[1].items.size() == 3);
}

TEST_CASE("parse: unbalanced brace reports the offending line") {
    const std::string text = "a 1;\nblock {\n  inner 2;\n";  // brace opened on line 2
    try {
        dict::parse(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);  // input ends inside the block, after line 3
    }

    const std::string early = "block {\n";
    CHECK_THROWS_AS(dict::parse(early), ParseError);
}

TEST_CASE("parse: comments are stripped") {
    const std::string text =
        "// line comment\n"
        "/* block\n   comment */\n"
        "startTime 0; // trailing\n";
    auto tree = dict::parse(text);
    REQUIRE(tree.entries.size() == 1);
    CHECK(tree.entries[0].keyword == "startTime");
}

TEST_CASE("parse: dimensioned scalar survives round-trip") {
    const std::string text = "nu [0 2 -1 0 0 0 0] 1e-05;\n";
    auto tree = dict::parse(text);
    REQUIRE(tree.entries.size() == 1);
    const Entry& nu = tree.entries[0];
    REQUIRE(nu.value.size() == 2);
    CHECK(nu.value[0].kind == Item::Kind::dims);
    CHECK(nu.value[0].dims ==
          std::vector<std::string>{"0", "2", "-1", "0", "0", "0", "0"});
    CHECK(nu.value[1].token == "1e-05");

    auto reparsed = dict::parse(dict::serialize(tree));
    CHECK(reparsed == tree);
}

TEST_CASE("serialize: empty tree is a header block only") {
    DictionaryTree tree;
    tree.header.object = "empty";
    const std::string out = dict::serialize(tree);
    CHECK(out.find("FoamFile") == 0);
    auto reparsed = dict::parse(out);
    CHECK(reparsed.entries.empty());
    CHECK(reparsed.header.object == "empty");
}

TEST_CASE("round-trip: parse . serialize . parse is identity on the fixture corpus") {
    auto files = fixture_corpus();
    REQUIRE(files.size() >= 20);
    for (const auto& path : files) {
        CAPTURE(path.string());
        auto first = dict::parse(core::read_text_file(path));
        auto second = dict::parse(dict::serialize(first));
        CHECK(second == first);
        // Serialization is a fixed point after one pass.
        CHECK(dict::serialize(second) == dict::serialize(first));
    }
}

TEST_CASE("lint: consistent cavity case produces no issues") {
    std::vector<core::FoamFile> files = {
        ff("controlDict", "system", core::read_text_file(fftest::fixtures_dir() /
                                                         "dict/controlDict.foam")),
        ff("blockMeshDict", "system", core::read_text_file(fftest::fixtures_dir() /
                                                           "dict/blockMeshDict.foam")),
        ff("U", "0", core::read_text_file(fftest::fixtures_dir() / "dict/U.foam")),
        ff("p", "0", core::read_text_file(fftest::fixtures_dir() / "dict/p.foam")),
        ff("transportProperties", "constant",
           core::read_text_file(fftest::fixtures_dir() / "dict/transportProperties.foam")),
    };
    core::CaseDescriptor descriptor{"cavity", "incompressible", "laminar flow", "icoFoam"};
    auto report = dict::lint_case(files, descriptor);
    CHECK(report.issues.empty());
    CHECK(report.parse_failures.empty());
}

TEST_CASE("lint: 0/ field referencing a patch outside the boundary set") {
    std::vector<core::FoamFile> files = {
        ff("U", "0",
           "dimensions [0 1 -1 0 0 0 0];\n"
           "internalField uniform (0 0 0);\n"
           "boundaryField { inlet { type fixedValue; value uniform (1 0 0); } }\n"),
    };
    core::CaseDescriptor descriptor{"c", "incompressible", "laminar flow", "icoFoam"};
    auto report = dict::lint_case(files, descriptor, {"movingWall", "fixedWalls"});
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].kind == dict::InconsistencyKind::boundary_patch_mismatch);
    CHECK(report.issues[0].detail.find("inlet") != std::string::npos);
    CHECK(report.issues[0].files == std::vector<std::string>{"0/U"});
}

TEST_CASE("lint: boundary set from blockMeshDict is honored") {
    std::vector<core::FoamFile> files = {
        ff("blockMeshDict", "system",
           core::read_text_file(fftest::fixtures_dir() / "dict/blockMeshDict.foam")),
        ff("U", "0",
           "boundaryField { movingWall { type noSlip; } badPatch { type empty; } }\n"),
    };
    core::CaseDescriptor descriptor{"c", "incompressible", "laminar flow", "icoFoam"};
    auto report = dict::lint_case(files, descriptor);
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].kind == dict::InconsistencyKind::boundary_patch_mismatch);
    CHECK(report.issues[0].detail.find("badPatch") != std::string::npos);
}

TEST_CASE("lint: dimension vector of length 6 is a dimension_mismatch") {
    std::vector<core::FoamFile> files = {
        ff("transportProperties", "constant", "nu [0 2 -1 0 0 0] 1e-05;\n"),
    };
    core::CaseDescriptor descriptor{"c", "incompressible", "laminar flow", "icoFoam"};
    auto report = dict::lint_case(files, descriptor);
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].kind == dict::InconsistencyKind::dimension_mismatch);
}

TEST_CASE("lint: controlDict application vs descriptor solver") {
    std::vector<core::FoamFile> files = {
        ff("controlDict", "system", "application simpleFoam;\nstartTime 0;\n"),
    };
    core::CaseDescriptor descriptor{"c", "incompressible", "laminar flow", "icoFoam"};
    auto report = dict::lint_case(files, descriptor);
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].kind == dict::InconsistencyKind::solver_mismatch);
}

TEST_CASE("lint: dangling $macro reference is a missing_field_reference") {
    std::vector<core::FoamFile> files = {
        ff("k", "0",
           "internalField uniform 0.1;\n"
           "boundaryField { inlet { type fixedValue; value $freestreamK; } }\n"),
    };
    core::CaseDescriptor descriptor{"c", "incompressible", "laminar flow", "icoFoam"};
    auto report = dict::lint_case(files, descriptor);
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].kind == dict::InconsistencyKind::missing_field_reference);

    // A resolvable $internalField reference, by contrast, is clean.
    std::vector<core::FoamFile> ok = {
        ff("k", "0",
           "internalField uniform 0.1;\n"
           "boundaryField { inlet { type fixedValue; value $internalField; } }\n"),
    };
    CHECK(dict::lint_case(ok, descriptor).issues.empty());
}

TEST_CASE("lint: unparsable file is collected, not fatal") {
    std::vector<core::FoamFile> files = {
        ff("controlDict", "system", "application icoFoam;\nbroken {\n"),
        ff("p", "0", "dimensions [0 2 -2 0 0 0 0];\n"),
    };
    core::CaseDescriptor descriptor{"c", "incompressible", "laminar flow", "icoFoam"};
    auto report = dict::lint_case(files, descriptor);
    REQUIRE(report.parse_failures.size() == 1);
    CHECK(report.parse_failures[0].file == "system/controlDict");
    CHECK(report.issues.empty());
}

TEST_CASE("lint is pure: identical inputs produce identical ordered output") {
    std::vector<core::FoamFile> files = {
        ff("transportProperties", "constant", "nu [0 2 -1 0 0 0] 1e-05;\n"),
        ff("U", "0", "boundaryField { ghost { type noSlip; } }\n"),
    };
    core::CaseDescriptor descriptor{"c", "incompressible", "laminar flow", "icoFoam"};
    auto a = dict::lint_case(files, descriptor, {"walls"});
    auto b = dict::lint_case(files, descriptor, {"walls"});
    CHECK(a.issues == b.issues);
    CHECK(a.parse_failures == b.parse_failures);
    REQUIRE(a.issues.size() == 2);
}

TEST_CASE("mutation suite: every seeded inconsistency is flagged") {
    // Start from the clean cavity fixture set and seed one fault per run.
    const std::string control =
        core::read_text_file(fftest::fixtures_dir() / "dict/controlDict.foam");
    const std::string blockmesh =
        core::read_text_file(fftest::fixtures_dir() / "dict/blockMeshDict.foam");
    const std::string u = core::read_text_file(fftest::fixtures_dir() / "dict/U.foam");
    const std::string transport =
        core::read_text_file(fftest::fixtures_dir() / "dict/transportProperties.foam");
    core::CaseDescriptor descriptor{"cavity", "incompressible", "laminar flow", "icoFoam"};

    auto lint_with = [&](std::vector<core::FoamFile> files) {
        return dict::lint_case(files, descriptor);
    };

    SUBCASE("patch-name mutation") {
        std::string mutated = u;
        const auto pos = mutated.find("movingWall");
        REQUIRE(pos != std::string::npos);
        mutated.replace(pos, std::string("movingWall").size(), "movingLid");
        auto report = lint_with({ff("controlDict", "system", control),
                                 ff("blockMeshDict", "system", blockmesh),
                                 ff("U", "0", mutated)});
        bool flagged = false;
        for (const auto& issue : report.issues) {
            if (issue.kind == dict::InconsistencyKind::boundary_patch_mismatch) flagged = true;
        }
        CHECK(flagged);
    }

    SUBCASE("dimension-length mutation") {
        std::string mutated = transport;
        const auto pos = mutated.find("[0 2 -1 0 0 0 0]");
        REQUIRE(pos != std::string::npos);
        mutated.replace(pos, std::string("[0 2 -1 0 0 0 0]").size(), "[0 2 -1 0 0 0]");
        auto report = lint_with({ff("transportProperties", "constant", mutated)});
        bool flagged = false;
        for (const auto& issue : report.issues) {
            if (issue.kind == dict::InconsistencyKind::dimension_mismatch) flagged = true;
        }
        CHECK(flagged);
    }

    SUBCASE("solver mutation") {
        std::string mutated = control;
        const auto pos = mutated.find("icoFoam");
        REQUIRE(pos != std::string::npos);
        mutated.replace(pos, std::string("icoFoam").size(), "pisoFoam");
        auto report = lint_with({ff("controlDict", "system", mutated)});
        bool flagged = false;
        for (const auto& issue : report.issues) {
            if (issue.kind == dict::InconsistencyKind::solver_mismatch) flagged = true;
        }
        CHECK(flagged);
    }
}

}  // TEST_SUITE
