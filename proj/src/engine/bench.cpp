#include "foamforge/engine/bench.hpp"

#include <cstdio>
#include <sstream>
#include <thread>

#include "foamforge/core/error.hpp"
#include "foamforge/core/state_io.hpp"
#include "foamforge/engine/workflow.hpp"
#include "foamforge/llm/scripted.hpp"
#include "foamforge/rag/index.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace foamforge::engine {

BenchSuite load_bench_suite(const fs::path& file) {
    json doc;
    try {
        doc = json::parse(core::read_text_file(file));
    } catch (const json::exception& e) {
        throw ConfigError("malformed bench suite " + file.string() + ": " + e.what());
    }
    BenchSuite suite;
    if (doc.contains("corpus_root")) {
        suite.corpus_root = doc["corpus_root"].get<std::string>();
    }
    if (!doc.contains("cases") || !doc["cases"].is_array() || doc["cases"].empty()) {
        throw ConfigError("bench suite needs a nonempty cases array");
    }
    for (const auto& c : doc["cases"]) {
        BenchCase bc;
        bc.name = c.at("name").get<std::string>();
        bc.requirement = c.at("requirement").get<std::string>();
        bc.fail_times = c.value("fail_times", 0);
        if (c.contains("responses")) {
            for (auto it = c["responses"].begin(); it != c["responses"].end(); ++it) {
                bc.responses[it.key()] = it.value().get<std::vector<std::string>>();
            }
        }
        suite.cases.push_back(std::move(bc));
    }
    return suite;
}

namespace {

std::string foam_header(const std::string& object, const std::string& location) {
    return "FoamFile\n{\n    version     2.0;\n    format      ascii;\n    class       "
           "dictionary;\n    location    \"" +
           location + "\";\n    object      " + object + ";\n}\n\n";
}

std::string field_header(const std::string& object) {
    return "FoamFile\n{\n    version     2.0;\n    format      ascii;\n    class       "
           "volVectorField;\n    object      " +
           object + ";\n}\n\n";
}

}  // namespace

void write_synthetic_corpus(const fs::path& dir, int case_count) {
    const char* domains[] = {"incompressible", "compressible", "heatTransfer"};
    const char* solvers[] = {"icoFoam", "simpleFoam", "pisoFoam"};
    const char* shapes[] = {"cavity", "channel", "duct", "bend", "step"};

    for (int i = 0; i < case_count; ++i) {
        const std::string domain = domains[i % 3];
        const std::string solver = solvers[i % 3];
        const std::string name = std::string(shapes[i % 5]) + std::to_string(i);
        const fs::path case_dir = dir / domain / solver / name;
        fs::create_directories(case_dir / "system");
        fs::create_directories(case_dir / "constant");
        fs::create_directories(case_dir / "0");

        core::write_text_file(
            case_dir / "system" / "controlDict",
            foam_header("controlDict", "system") + "application     " + solver +
                ";\n\nstartTime       0;\nendTime         " + std::to_string(1 + i % 7) +
                ";\ndeltaT          0.00" + std::to_string(1 + i % 9) +
                ";\nwriteInterval   " + std::to_string(10 + i) + ";\n");
        core::write_text_file(case_dir / "system" / "fvSchemes",
                              foam_header("fvSchemes", "system") +
                                  "ddtSchemes\n{\n    default         Euler;\n}\n\n"
                                  "divSchemes\n{\n    default         none;\n    div(phi,U)  "
                                  "    Gauss linear;\n}\n");
        core::write_text_file(
            case_dir / "system" / "fvSolution",
            foam_header("fvSolution", "system") + "solvers\n{\n    p\n    {\n        solver  "
                "        PCG;\n        tolerance       1e-0" +
                std::to_string(5 + i % 3) + ";\n    }\n}\n");
        core::write_text_file(
            case_dir / "constant" / "transportProperties",
            foam_header("transportProperties", "constant") + "nu              [0 2 -1 0 0 0 0] "
                "1e-0" +
                std::to_string(2 + i % 5) + ";\n");

        const std::string inlet = i % 2 ? "inlet" : "movingWall";
        const std::string walls = i % 2 ? "outlet" : "fixedWalls";
        core::write_text_file(
            case_dir / "0" / "U",
            field_header("U") + "dimensions      [0 1 -1 0 0 0 0];\n\ninternalField   uniform "
                "(0 0 0);\n\nboundaryField\n{\n    " +
                inlet + "\n    {\n        type            fixedValue;\n        value        "
                "   uniform (" +
                std::to_string(i % 4) + " 0 0);\n    }\n    " + walls +
                "\n    {\n        type            noSlip;\n    }\n}\n");
        core::write_text_file(
            case_dir / "0" / "p",
            field_header("p") + "dimensions      [0 2 -2 0 0 0 0];\n\ninternalField   uniform "
                "0;\n\nboundaryField\n{\n    " +
                inlet + "\n    {\n        type            zeroGradient;\n    }\n    " + walls +
                "\n    {\n        type            zeroGradient;\n    }\n}\n");

        core::write_text_file(case_dir / "Allrun",
                              "#!/bin/sh\ncd ${0%/*} || exit 1\n. ${WM_PROJECT_DIR:?}/bin/"
                              "tools/RunFunctions\n\nrunApplication blockMesh\nrunApplication " +
                                  solver + "\n");
    }
}

std::map<std::string, std::vector<std::string>> default_scripted_responses() {
    const std::string fatal_fix_content =
        foam_header("controlDict", "system") +
        "application     icoFoam;\n\nstartTime       0;\nendTime         0.5;\ndeltaT        "
        "  0.001;\nwriteControl    timeStep;\nwriteInterval   20;\n";

    std::map<std::string, std::vector<std::string>> responses;
    responses["case_description"] = {
        R"({"case_name": "cavity", "case_domain": "incompressible", "case_category": "laminar flow", "case_solver": "icoFoam"})"};
    responses["task_decomposition"] = {R"({"subtasks": [
        {"file_name": "controlDict", "folder_name": "system"},
        {"file_name": "fvSchemes", "folder_name": "system"},
        {"file_name": "fvSolution", "folder_name": "system"},
        {"file_name": "transportProperties", "folder_name": "constant"},
        {"file_name": "U", "folder_name": "0"},
        {"file_name": "p", "folder_name": "0"}]})"};
    responses["file_generation"] = {
        foam_header("controlDict", "system") +
            "application     icoFoam;\n\nstartTime       0;\nendTime         0.5;\ndeltaT    "
            "      0.005;\nwriteControl    timeStep;\nwriteInterval   20;\n",
        foam_header("fvSchemes", "system") +
            "ddtSchemes\n{\n    default         Euler;\n}\n\ndivSchemes\n{\n    default       "
            "  none;\n    div(phi,U)      Gauss linear;\n}\n\nlaplacianSchemes\n{\n    "
            "default         Gauss linear corrected;\n}\n",
        foam_header("fvSolution", "system") +
            "solvers\n{\n    p\n    {\n        solver          PCG;\n        preconditioner  "
            "DIC;\n        tolerance       1e-06;\n        relTol          0.05;\n    }\n    "
            "U\n    {\n        solver          smoothSolver;\n        smoother        "
            "symGaussSeidel;\n        tolerance       1e-05;\n        relTol          0;\n    "
            "}\n}\n\nPISO\n{\n    nCorrectors     2;\n    nNonOrthogonalCorrectors 0;\n}\n",
        foam_header("blockMeshDict", "system") +
            "convertToMeters 0.1;\n\nvertices\n(\n    (0 0 0)\n    (1 0 0)\n    (1 1 0)\n    "
            "(0 1 0)\n    (0 0 0.1)\n    (1 0 0.1)\n    (1 1 0.1)\n    (0 1 0.1)\n);\n\n"
            "blocks\n(\n    hex (0 1 2 3 4 5 6 7) (20 20 1) simpleGrading (1 1 1)\n);\n\n"
            "boundary\n(\n    movingWall\n    {\n        type wall;\n        faces\n        "
            "(\n            (3 7 6 2)\n        );\n    }\n    fixedWalls\n    {\n        type "
            "wall;\n        faces\n        (\n            (0 4 7 3)\n            (2 6 5 1)\n  "
            "          (1 5 4 0)\n        );\n    }\n    frontAndBack\n    {\n        type "
            "empty;\n        faces\n        (\n            (0 3 2 1)\n            (4 5 6 7)\n "
            "       );\n    }\n);\n",
        foam_header("transportProperties", "constant") +
            "nu              [0 2 -1 0 0 0 0] 0.01;\n",
        field_header("U") +
            "dimensions      [0 1 -1 0 0 0 0];\n\ninternalField   uniform (0 0 0);\n\n"
            "boundaryField\n{\n    movingWall\n    {\n        type            fixedValue;\n   "
            "     value           uniform (1 0 0);\n    }\n    fixedWalls\n    {\n        "
            "type            noSlip;\n    }\n    frontAndBack\n    {\n        type            "
            "empty;\n    }\n}\n",
        field_header("p") +
            "dimensions      [0 2 -2 0 0 0 0];\n\ninternalField   uniform 0;\n\n"
            "boundaryField\n{\n    movingWall\n    {\n        type            zeroGradient;\n "
            "   }\n    fixedWalls\n    {\n        type            zeroGradient;\n    }\n    "
            "frontAndBack\n    {\n        type            empty;\n    }\n}\n"};
    responses["command_generation"] = {"blockMesh\nicoFoam"};
    responses["allrun_generation"] = {
        "```\n#!/bin/sh\ncd ${0%/*} || exit 1\n. ${WM_PROJECT_DIR:?}/bin/tools/RunFunctions\n\n"
        "runApplication blockMesh\nrunApplication icoFoam\n```"};
    responses["error_analysis_initial"] = {
        "The solver diverged because deltaT is too large for the mesh; reduce deltaT in "
        "system/controlDict and keep every parameter the user pinned unchanged."};
    responses["error_analysis_subsequent"] = {
        "The error persists; reduce deltaT further and re-run without touching user-pinned "
        "values."};
    responses["file_correction"] = {json{{"foamfile",
                                          json::array({json{{"file_name", "controlDict"},
                                                            {"folder_name", "system"},
                                                            {"content", fatal_fix_content}}})}}
                                        .dump()};
    responses["visualization_script"] = {
        "```\nimport sys\nprint('render placeholder')\n```"};
    responses["visualization_script_retry"] = {
        "```\nimport sys\nprint('render placeholder, fixed')\n```"};
    responses["mesh_gmsh_script"] = {
        "```\nimport gmsh\ngmsh.initialize()\n# geometry per requirement\ngmsh.write('mesh."
        "msh')\ngmsh.finalize()\n```"};
    return responses;
}

namespace {

exec::ExecutionResult scripted_failure() {
    exec::ExecutionResult r;
    r.status = exec::ExecStatus::failure;
    r.logs["log.icoFoam"] =
        "Create time\n\n--> FOAM FATAL ERROR:\nMaximum number of iterations exceeded\n\n    "
        "From function Foam::scalar\n    in file thermo.H at line 66.\n\nFOAM exiting\n";
    r.exit_codes["icoFoam"] = 1;
    return r;
}

exec::ExecutionResult scripted_success() {
    exec::ExecutionResult r;
    r.status = exec::ExecStatus::success;
    r.logs["log.blockMesh"] = "Creating block mesh\nEnd\n";
    r.logs["log.icoFoam"] = "Create time\nStarting time loop\nEnd\n";
    r.exit_codes["blockMesh"] = 0;
    r.exit_codes["icoFoam"] = 0;
    return r;
}

struct CaseOutcome {
    bool success = false;
    std::int64_t tokens = 0;
    int loops = 0;
};

struct ConfigRow {
    bool reviewer;
    bool file_dependency;
    core::RetrievalMode retrieval;
};

std::string fmt(double value, int decimals) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

}  // namespace

std::string run_bench(const BenchSuite& suite, const BenchOptions& options) {
    // Shared read-only fixtures for every row.
    const fs::path corpus = suite.corpus_root.empty()
                                ? options.workdir / "bench_corpus"
                                : suite.corpus_root;
    if (suite.corpus_root.empty()) write_synthetic_corpus(corpus, 6);

    auto embedder = std::make_shared<llm::HashEmbedder>(options.base.embedding_dim);
    auto records = rag::ingest_corpus(corpus);
    auto commands = rag::load_command_docs(options.data_dir / "commands_help.txt");
    rag::IndexSet indices = rag::IndexSet::build(records, commands, embedder);

    const auto prompts = prompts::PromptLibrary::load(options.data_dir / "prompts");
    const auto schemas = llm::SchemaRegistry::with_builtins();
    const auto vocab = core::VocabularySets::load(options.data_dir / "vocab.json");
    const auto defaults = default_scripted_responses();

    std::vector<ConfigRow> rows;
    const std::vector<bool> reviewer_values =
        options.vary_reviewer ? std::vector<bool>{true, false}
                              : std::vector<bool>{options.base.reviewer_enabled};
    const std::vector<bool> fd_values =
        options.vary_file_dependency ? std::vector<bool>{true, false}
                                     : std::vector<bool>{options.base.file_dependency_enabled};
    const std::vector<core::RetrievalMode> retrieval_values =
        options.vary_retrieval
            ? std::vector<core::RetrievalMode>{core::RetrievalMode::hierarchy,
                                               core::RetrievalMode::single_index}
            : std::vector<core::RetrievalMode>{options.base.retrieval_mode};
    for (bool reviewer : reviewer_values) {
        for (bool fd : fd_values) {
            for (auto retrieval : retrieval_values) {
                rows.push_back({reviewer, fd, retrieval});
            }
        }
    }

    std::ostringstream csv;
    csv << "reviewer,file_dependency,retrieval_mode,success_rate,token_usage,"
           "avg_reviewer_loops\n";

    int row_index = 0;
    for (const auto& row : rows) {
        core::Config config = options.base;
        config.reviewer_enabled = row.reviewer;
        config.file_dependency_enabled = row.file_dependency;
        config.retrieval_mode = row.retrieval;

        const std::string row_tag = "row" + std::to_string(row_index++);
        std::vector<CaseOutcome> outcomes(suite.cases.size());

        auto run_case = [&](std::size_t i) {
            const BenchCase& bench_case = suite.cases[i];
            auto responses = defaults;
            for (const auto& [key, values] : bench_case.responses) responses[key] = values;
            auto provider = std::make_shared<llm::PatternProvider>(
                responses, options.base.embedding_dim);

            std::vector<exec::ExecutionResult> script;
            for (int f = 0; f < bench_case.fail_times; ++f) script.push_back(scripted_failure());
            // Enough successes for the final run plus a visualization pass.
            script.push_back(scripted_success());
            script.push_back(scripted_success());
            auto executor = std::make_shared<exec::FakeExecutor>(std::move(script));

            WorkflowDeps deps;
            deps.provider = provider;
            deps.executor = executor;
            deps.indices = &indices;
            deps.prompts = &prompts;
            deps.schemas = &schemas;
            deps.vocab = &vocab;
            deps.workdir = options.workdir / row_tag;
            deps.case_id = bench_case.name;

            auto outcome = run_workflow(bench_case.requirement, {}, config, deps);
            outcomes[i] = CaseOutcome{
                outcome.state.run_status == core::RunStatus::success,
                outcome.state.token_usage,
                outcome.state.loop_count,
            };
        };

        if (options.jobs <= 1) {
            for (std::size_t i = 0; i < suite.cases.size(); ++i) run_case(i);
        } else {
            std::vector<std::thread> pool;
            std::size_t next = 0;
            while (next < suite.cases.size()) {
                pool.clear();
                for (int j = 0; j < options.jobs && next < suite.cases.size(); ++j, ++next) {
                    pool.emplace_back(run_case, next);
                }
                for (auto& t : pool) t.join();
            }
        }

        // Aggregate in case order.
        int successes = 0;
        std::int64_t tokens = 0;
        int loops = 0;
        for (const auto& o : outcomes) {
            successes += o.success ? 1 : 0;
            tokens += o.tokens;
            loops += o.loops;
        }
        const double n = static_cast<double>(suite.cases.size());
        csv << (row.reviewer ? "on" : "off") << ","
            << (row.file_dependency ? "on" : "off") << ","
            << (row.retrieval == core::RetrievalMode::hierarchy ? "hierarchy" : "single_index")
            << "," << fmt(100.0 * successes / n, 1) << ","
            << static_cast<std::int64_t>(static_cast<double>(tokens) / n) << ","
            << fmt(loops / n, 2) << "\n";
    }
    return csv.str();
}

}  // namespace foamforge::engine
