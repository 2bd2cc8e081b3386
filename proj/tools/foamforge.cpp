// foamforge CLI: one-shot end-to-end runs, index building, the tool
// service, and the ablation bench harness.

#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "foamforge/core/error.hpp"
#include "foamforge/core/state_io.hpp"
#include "foamforge/engine/bench.hpp"
#include "foamforge/engine/workflow.hpp"
#include "foamforge/llm/http_provider.hpp"
#include "foamforge/llm/schema.hpp"
#include "foamforge/llm/scripted.hpp"
#include "foamforge/mcp/service.hpp"
#include "foamforge/prompts/library.hpp"
#include "foamforge/rag/index.hpp"
#include "httplib.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace foamforge;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitSimulationFailure = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string workdir = "work";
    std::string data_dir;
    std::string settings_file;

    std::string provider = "pattern";  // pattern | scripted | openai
    std::string script_file;
    std::string executor = "fake";  // fake | local
    std::string exec_script_file;

    std::string index_dir;
    std::string corpus_dir;

    core::Config config;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--workdir", opt.workdir, "Workspace root for case directories");
    cmd->add_option("--data-dir", opt.data_dir, "Prompt/vocab data directory");
    cmd->add_option("--settings", opt.settings_file, "Settings file (JSON); flags override");
    cmd->add_option("--provider", opt.provider, "Completion backend: pattern|scripted|openai");
    cmd->add_option("--script", opt.script_file, "Canned responses file for offline providers");
    cmd->add_option("--executor", opt.executor, "Execution backend: fake|local");
    cmd->add_option("--exec-script", opt.exec_script_file,
                    "Scripted outcomes file for the fake executor");
    cmd->add_option("--index", opt.index_dir, "Persisted index directory to load");
    cmd->add_option("--corpus", opt.corpus_dir, "Corpus root to ingest when no index is given");

    cmd->add_option("--max-loops", opt.config.max_loops, "Reviewer iteration bound");
    cmd->add_flag("--no-reviewer",
                  [&opt](std::int64_t) { opt.config.reviewer_enabled = false; },
                  "Disable the reviewer loop");
    cmd->add_flag("--no-file-dependency",
                  [&opt](std::int64_t) { opt.config.file_dependency_enabled = false; },
                  "Disable dependency-aware generation context");
    cmd->add_option("--temperature", opt.config.temperature, "Sampling temperature");
    cmd->add_option("--top-k", opt.config.top_k, "Retrieval match count");
    cmd->add_option("--retrieval",
                    [&opt](const std::vector<std::string>& v) {
                        opt.config.retrieval_mode = v.front() == "single_index"
                                                        ? core::RetrievalMode::single_index
                                                        : core::RetrievalMode::hierarchy;
                        return true;
                    },
                    "Retrieval mode: hierarchy|single_index");
    cmd->add_option("--embedding-dim", opt.config.embedding_dim, "Embedding dimensionality");
}

void apply_settings_file(CommonOptions& opt) {
    fs::path path = opt.settings_file.empty() ? fs::path("foamforge.json")
                                              : fs::path(opt.settings_file);
    if (!fs::exists(path)) {
        if (!opt.settings_file.empty()) {
            throw ConfigError("settings file not found: " + path.string());
        }
        return;
    }
    json doc = json::parse(core::read_text_file(path));
    opt.config.max_loops = doc.value("max_loops", opt.config.max_loops);
    opt.config.reviewer_enabled = doc.value("reviewer_enabled", opt.config.reviewer_enabled);
    opt.config.file_dependency_enabled =
        doc.value("file_dependency_enabled", opt.config.file_dependency_enabled);
    opt.config.temperature = doc.value("temperature", opt.config.temperature);
    opt.config.top_k = doc.value("top_k", opt.config.top_k);
    opt.config.embedding_dim = doc.value("embedding_dim", opt.config.embedding_dim);
    if (doc.value("retrieval_mode", "hierarchy") == std::string("single_index")) {
        opt.config.retrieval_mode = core::RetrievalMode::single_index;
    }
    if (doc.contains("provider")) opt.provider = doc["provider"].get<std::string>();
    if (doc.contains("workdir")) opt.workdir = doc["workdir"].get<std::string>();
}

fs::path data_dir_of(const CommonOptions& opt) {
    if (!opt.data_dir.empty()) return opt.data_dir;
    return prompts::default_data_dir();
}

std::shared_ptr<llm::Provider> make_provider(const CommonOptions& opt) {
    if (opt.provider == "scripted") {
        std::vector<std::string> responses;
        if (!opt.script_file.empty()) {
            json doc = json::parse(core::read_text_file(opt.script_file));
            responses = doc.at("responses").get<std::vector<std::string>>();
        }
        return std::make_shared<llm::ScriptedProvider>(responses, opt.config.embedding_dim);
    }
    if (opt.provider == "pattern") {
        auto responses = engine::default_scripted_responses();
        if (!opt.script_file.empty()) {
            json doc = json::parse(core::read_text_file(opt.script_file));
            const json by_template = doc.value("by_template", json::object());
            for (auto it = by_template.begin(); it != by_template.end(); ++it) {
                responses[it.key()] = it.value().get<std::vector<std::string>>();
            }
        }
        return std::make_shared<llm::PatternProvider>(responses, opt.config.embedding_dim);
    }
    if (opt.provider == "openai") {
        llm::HttpProviderSettings settings;
        settings.embedding_dim = opt.config.embedding_dim;
        fs::path path = opt.settings_file.empty() ? fs::path("foamforge.json")
                                                  : fs::path(opt.settings_file);
        if (fs::exists(path)) {
            json doc = json::parse(core::read_text_file(path));
            settings.base_url = doc.value("base_url", "");
            settings.model = doc.value("model", "");
            settings.embed_model = doc.value("embed_model", "");
            settings.api_key_env = doc.value("api_key_env", settings.api_key_env);
        }
        return std::make_shared<llm::HttpProvider>(settings);
    }
    throw ConfigError("unknown provider: " + opt.provider);
}

std::shared_ptr<exec::ExecutorContract> make_executor(const CommonOptions& opt) {
    if (opt.executor == "fake") {
        std::vector<exec::ExecutionResult> script;
        if (!opt.exec_script_file.empty()) {
            json doc = json::parse(core::read_text_file(opt.exec_script_file));
            for (const auto& r : doc.at("results")) {
                exec::ExecutionResult result;
                result.status = r.value("status", "success") == std::string("failure")
                                    ? exec::ExecStatus::failure
                                    : exec::ExecStatus::success;
                if (r.contains("logs")) {
                    result.logs = r["logs"].get<std::map<std::string, std::string>>();
                }
                if (r.contains("exit_codes")) {
                    result.exit_codes = r["exit_codes"].get<std::map<std::string, int>>();
                }
                script.push_back(std::move(result));
            }
        } else {
            for (int i = 0; i < 3; ++i) {
                exec::ExecutionResult result;
                result.status = exec::ExecStatus::success;
                result.logs["log.run"] = "End\n";
                script.push_back(std::move(result));
            }
        }
        return std::make_shared<exec::FakeExecutor>(std::move(script));
    }
    if (opt.executor == "local") {
        return std::make_shared<exec::LocalExecutor>();
    }
    throw ConfigError("unknown executor: " + opt.executor);
}

rag::IndexSet make_index(const CommonOptions& opt, std::shared_ptr<llm::Embedder> embedder) {
    const fs::path data = data_dir_of(opt);
    if (!opt.index_dir.empty()) {
        return rag::IndexSet::load(opt.index_dir, std::move(embedder));
    }
    fs::path corpus = opt.corpus_dir;
    if (corpus.empty()) {
        corpus = fs::path(opt.workdir) / "demo_corpus";
        if (!fs::exists(corpus)) engine::write_synthetic_corpus(corpus, 6);
    }
    auto records = rag::ingest_corpus(corpus);
    auto commands = rag::load_command_docs(data / "commands_help.txt");
    return rag::IndexSet::build(records, commands, std::move(embedder));
}

std::shared_ptr<llm::Embedder> make_embedder(const CommonOptions& opt,
                                             std::shared_ptr<llm::Provider> provider) {
    if (opt.provider == "openai") return provider;
    return std::make_shared<llm::HashEmbedder>(opt.config.embedding_dim);
}

int cmd_run(const CommonOptions& opt, const std::string& prompt_file,
            const std::string& inline_text, const std::vector<std::string>& attachments,
            const std::string& case_id) {
    std::string requirement = inline_text;
    if (requirement.empty()) {
        if (prompt_file.empty()) {
            throw ConfigError("run needs a prompt file argument or --text");
        }
        requirement = core::read_text_file(prompt_file);
    }

    const fs::path data = data_dir_of(opt);
    auto prompt_lib = prompts::PromptLibrary::load(data / "prompts");
    auto schemas = llm::SchemaRegistry::with_builtins();
    auto vocab = core::VocabularySets::load(data / "vocab.json");

    auto provider = make_provider(opt);
    auto indices = make_index(opt, make_embedder(opt, provider));

    engine::WorkflowDeps deps;
    deps.provider = provider;
    deps.executor = make_executor(opt);
    deps.indices = &indices;
    deps.prompts = &prompt_lib;
    deps.schemas = &schemas;
    deps.vocab = &vocab;
    deps.workdir = opt.workdir;
    deps.case_id = case_id;

    std::vector<fs::path> attach;
    for (const auto& a : attachments) attach.emplace_back(a);

    auto outcome = engine::run_workflow(requirement, attach, opt.config, deps);
    const auto& state = outcome.state;
    std::cout << "case_id:      " << state.case_id << "\n"
              << "status:       " << core::run_status_name(state.run_status) << "\n"
              << "loop_count:   " << state.loop_count << "\n"
              << "token_usage:  " << state.token_usage << "\n"
              << "files:        " << state.foamfiles.size() << "\n"
              << "workspace:    " << (fs::path(opt.workdir) / state.case_id).string() << "\n";
    return state.run_status == core::RunStatus::success ? kExitSuccess
                                                        : kExitSimulationFailure;
}

int cmd_index_build(const CommonOptions& opt, const std::string& corpus_root,
                    const std::string& out_dir, const std::string& embedder_kind) {
    const fs::path data = data_dir_of(opt);
    std::shared_ptr<llm::Embedder> embedder;
    if (embedder_kind == "hash") {
        embedder = std::make_shared<llm::HashEmbedder>(opt.config.embedding_dim);
    } else if (embedder_kind == "openai") {
        embedder = make_provider(opt);
    } else {
        throw ConfigError("unknown embedder: " + embedder_kind);
    }
    auto records = rag::ingest_corpus(corpus_root);
    auto commands = rag::load_command_docs(data / "commands_help.txt");
    auto indices = rag::IndexSet::build(records, commands, embedder);
    indices.save(out_dir);
    std::cout << "ingested " << records.size() << " cases; index written to " << out_dir
              << "\n";
    return kExitSuccess;
}

int cmd_serve(const CommonOptions& opt, bool deterministic_jobs, int http_port) {
    const fs::path data = data_dir_of(opt);
    auto prompt_lib = prompts::PromptLibrary::load(data / "prompts");
    auto schemas = llm::SchemaRegistry::with_builtins();
    auto vocab = core::VocabularySets::load(data / "vocab.json");

    auto provider = make_provider(opt);
    auto indices = make_index(opt, make_embedder(opt, provider));

    mcp::ServiceOptions service_options;
    service_options.deterministic_jobs = deterministic_jobs;
    mcp::McpService service(opt.workdir, provider, make_executor(opt), &indices, &prompt_lib,
                            &schemas, &vocab, opt.config, service_options);

    if (http_port > 0) {
        httplib::Server server;
        server.Post("/rpc", [&service](const httplib::Request& req, httplib::Response& res) {
            json request;
            try {
                request = json::parse(req.body);
            } catch (const json::exception& e) {
                res.set_content(
                    json{{"jsonrpc", "2.0"},
                         {"id", nullptr},
                         {"error",
                          {{"code", -32700}, {"message", std::string("parse error: ") + e.what()}}}}
                        .dump(),
                    "application/json");
                return;
            }
            res.set_content(service.handle_rpc(request).dump(), "application/json");
        });
        std::cerr << "foamforge service listening on http://127.0.0.1:" << http_port
                  << "/rpc\n";
        server.listen("127.0.0.1", http_port);
        return kExitSuccess;
    }

    service.serve_stdio(std::cin, std::cout);
    return kExitSuccess;
}

int cmd_bench(const CommonOptions& opt, const std::string& suite_file,
              const std::string& out_csv, const std::string& matrix, int jobs) {
    engine::BenchSuite suite = engine::load_bench_suite(suite_file);
    engine::BenchOptions options;
    options.base = opt.config;
    options.jobs = jobs;
    options.workdir = fs::path(opt.workdir) / "bench";
    options.data_dir = data_dir_of(opt);
    options.vary_reviewer = matrix.find("reviewer") != std::string::npos;
    options.vary_file_dependency = matrix.find("file_dependency") != std::string::npos;
    options.vary_retrieval = matrix.find("retrieval") != std::string::npos;

    const std::string csv = engine::run_bench(suite, options);
    if (out_csv.empty() || out_csv == "-") {
        std::cout << csv;
    } else {
        core::write_text_file(out_csv, csv);
        std::cout << "wrote " << out_csv << "\n";
    }
    return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"foamforge: natural-language CFD case generation and execution"};
    app.require_subcommand(1);

    CommonOptions opt;

    auto* run = app.add_subcommand("run", "Run the end-to-end workflow for one requirement");
    std::string prompt_file, inline_text, case_id;
    std::vector<std::string> attachments;
    run->add_option("prompt_file", prompt_file, "File containing the natural-language request");
    run->add_option("--text", inline_text, "Inline request text");
    run->add_option("--attach", attachments, "Attachment paths (.msh, blockMeshDict, ...)");
    run->add_option("--case-id", case_id, "Case identifier (defaults to a content hash)");
    add_common_flags(run, opt);

    auto* index = app.add_subcommand("index", "Knowledge index maintenance");
    auto* index_build = index->add_subcommand("build", "Ingest a corpus and build the indices");
    std::string corpus_root, out_dir, embedder_kind = "hash";
    index_build->add_option("corpus_root", corpus_root, "Tutorial corpus root")->required();
    index_build->add_option("-o,--out", out_dir, "Output index directory")->required();
    index_build->add_option("--embedder", embedder_kind, "hash|openai");
    add_common_flags(index_build, opt);

    auto* serve = app.add_subcommand("serve", "Serve the tool protocol over stdio");
    bool deterministic_jobs = true;
    bool async_jobs = false;
    int http_port = 0;
    serve->add_flag("--async-jobs", async_jobs, "Run jobs on background workers");
    serve->add_option("--http", http_port, "Also listen for JSON-RPC POSTs on this port");
    add_common_flags(serve, opt);

    auto* bench = app.add_subcommand("bench", "Run the scripted ablation bench");
    std::string suite_file, out_csv, matrix = "reviewer,file_dependency";
    int jobs = 1;
    bench->add_option("suite", suite_file, "Bench suite JSON")->required();
    bench->add_option("-o,--out", out_csv, "CSV output path (default stdout)");
    bench->add_option("--matrix", matrix,
                      "Toggles to vary: reviewer,file_dependency[,retrieval]");
    bench->add_option("--jobs", jobs, "Parallel case bound");
    add_common_flags(bench, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitSuccess : kExitUsage;
    }

    try {
        apply_settings_file(opt);
        opt.config.validate();
        if (run->parsed()) return cmd_run(opt, prompt_file, inline_text, attachments, case_id);
        if (index_build->parsed()) {
            return cmd_index_build(opt, corpus_root, out_dir, embedder_kind);
        }
        if (serve->parsed()) {
            return cmd_serve(opt, deterministic_jobs && !async_jobs, http_port);
        }
        if (bench->parsed()) return cmd_bench(opt, suite_file, out_csv, matrix, jobs);
        std::cerr << "no subcommand selected\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitUsage;
    }
}
