#include "foamforge/mcp/service.hpp"

#include <iostream>

#include "foamforge/core/error.hpp"
#include "foamforge/llm/schema.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace foamforge::mcp {

// ---------------------------------------------------------------------------
// JobStore
// ---------------------------------------------------------------------------

JobStore::JobStore(bool deterministic, int workers) : deterministic_(deterministic) {
    if (!deterministic_) {
        for (int i = 0; i < std::max(1, workers); ++i) {
            workers_.emplace_back([this] { worker_loop(); });
        }
    }
}

JobStore::~JobStore() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
}

void JobStore::execute(std::unique_lock<std::mutex>& lock, const std::string& id) {
    // Caller holds the lock; the work itself runs unlocked so other calls
    // can proceed while a job executes.
    auto it = jobs_.find(id);
    if (it == jobs_.end()) return;
    it->second.record.status = "running";
    auto work = it->second.work;
    lock.unlock();
    json summary;
    bool ok = true;
    try {
        summary = work();
    } catch (const std::exception& e) {
        ok = false;
        summary = json{{"error", e.what()}};
    }
    lock.lock();
    it = jobs_.find(id);
    if (it != jobs_.end()) {
        it->second.record.status = ok ? "succeeded" : "failed";
        it->second.record.result_summary = std::move(summary);
    }
}

std::string JobStore::enqueue(JobKind kind, const std::string& case_id,
                              std::function<json()> work) {
    std::lock_guard lock(mutex_);
    std::string job_id = "job-" + std::to_string(next_id_++);
    Slot slot;
    slot.record = JobRecord{job_id, kind, case_id, "pending", json::object()};
    slot.work = std::move(work);
    jobs_.emplace(job_id, std::move(slot));
    if (!deterministic_) {
        queue_.push_back(job_id);
        cv_.notify_one();
    }
    return job_id;
}

JobRecord JobStore::get(const std::string& job_id) {
    std::unique_lock lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) throw UnknownJob(job_id);
    if (deterministic_ && it->second.record.status != "succeeded" &&
        it->second.record.status != "failed") {
        // Advance one lifecycle step per poll: pending on the first poll,
        // running on the second (the work executes then), final afterward.
        it->second.polls += 1;
        if (it->second.polls == 2) {
            JobRecord running = it->second.record;
            running.status = "running";
            execute(lock, job_id);
            return running;
        }
    }
    return jobs_.at(job_id).record;
}

std::vector<JobRecord> JobStore::list(const std::string& case_id) const {
    std::lock_guard lock(mutex_);
    std::vector<JobRecord> out;
    for (const auto& [_, slot] : jobs_) {
        if (case_id.empty() || slot.record.case_id == case_id) out.push_back(slot.record);
    }
    return out;
}

void JobStore::worker_loop() {
    for (;;) {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (stopping_ && queue_.empty()) return;
        const std::string id = queue_.front();
        queue_.pop_front();
        execute(lock, id);
    }
}

// ---------------------------------------------------------------------------
// McpService
// ---------------------------------------------------------------------------

McpService::McpService(fs::path workdir, std::shared_ptr<llm::Provider> provider,
                       std::shared_ptr<exec::ExecutorContract> executor,
                       const rag::IndexSet* indices, const prompts::PromptLibrary* prompts,
                       const llm::SchemaRegistry* schemas, const core::VocabularySets* vocab,
                       core::Config config, ServiceOptions options)
    : workspace_(std::move(workdir)),
      provider_(std::move(provider)),
      executor_(std::move(executor)),
      indices_(indices),
      tools_(register_tools()),
      jobs_(options.deterministic_jobs, options.workers) {
    env_.prompts = prompts;
    env_.schemas = schemas;
    env_.vocab = vocab;
    env_.config = config;
}

core::CaseState McpService::load_case(const std::string& case_id) {
    return workspace_.load_state(case_id);
}

agents::WorkflowContext McpService::load_context(const std::string& case_id) {
    const fs::path path = workspace_.case_dir(case_id) / "context.json";
    if (!fs::exists(path)) return {};
    return agents::WorkflowContext::from_json(core::read_text_file(path));
}

void McpService::save_case(const core::CaseState& state, const agents::WorkflowContext& ctx) {
    workspace_.save_state(state);
    core::write_text_file(workspace_.case_dir(state.case_id) / "context.json", ctx.to_json());
}

std::string McpService::fresh_case_id() {
    for (;;) {
        std::string id = "case-" + std::to_string(++case_counter_);
        if (!workspace_.has_case(id)) return id;
    }
}

json McpService::handle_call(const std::string& name, const json& args) {
    std::lock_guard lock(mutex_);

    const ToolDescriptor* tool = nullptr;
    for (const auto& t : tools_) {
        if (t.name == name) {
            tool = &t;
            break;
        }
    }
    if (!tool) throw UnknownTool(name);

    auto errors = llm::validate_schema(tool->input_schema, args);
    if (!errors.empty()) {
        std::string msg;
        for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
        throw SchemaViolation("invalid arguments for " + name + ": " + msg);
    }

    json result = dispatch(name, args);

    errors = llm::validate_schema(tool->output_schema, result);
    if (!errors.empty()) {
        std::string msg;
        for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
        throw SchemaViolation("internal result for " + name + " violates its schema: " + msg);
    }
    return result;
}

json McpService::dispatch(const std::string& name, const json& args) {
    if (name == "create_case") {
        core::CaseState state;
        state.case_id = fresh_case_id();
        state.user_requirement = args.at("user_prompt").get<std::string>();
        workspace_.init_case(state.case_id);
        save_case(state, {});
        return json{{"case_id", state.case_id}};
    }

    if (name == "plan_simulation_structure") {
        auto state = load_case(args.at("case_id").get<std::string>());
        auto ctx = load_context(state.case_id);
        agents::architect_plan(state, *indices_, *provider_, env_, ctx);
        save_case(state, ctx);
        json plan = json::array();
        for (const auto& f : state.plan.files) {
            plan.push_back(json{{"file", f.file_name}, {"folder", f.folder_name}});
        }
        return json{{"plan", plan}};
    }

    if (name == "generate_file_content") {
        auto state = load_case(args.at("case_id").get<std::string>());
        auto ctx = load_context(state.case_id);
        core::PlannedFile planned;
        planned.file_name = args.at("file").get<std::string>();
        planned.folder_name = args.at("folder").get<std::string>();
        if (planned.folder_name == "." || planned.folder_name == "root") {
            planned.folder_name.clear();
        }
        auto file =
            agents::generate_single_file(state, planned, *indices_, *provider_, env_, ctx);
        save_case(state, ctx);
        workspace_.materialize(state);
        return json{{"content", file.content}};
    }

    if (name == "generate_mesh") {
        const std::string case_id = args.at("case_id").get<std::string>();
        load_case(case_id);  // throws UnknownCase before enqueuing
        const json config = args.at("mesh_config");
        std::string job_id = jobs_.enqueue(JobKind::mesh, case_id, [this, case_id, config] {
            auto state = load_case(case_id);
            auto ctx = load_context(case_id);
            agents::MeshSpec spec;
            if (config.contains("mode")) {
                const std::string mode = config["mode"].get<std::string>();
                if (mode == "external_msh") spec.mode = agents::MeshMode::external_msh;
                else if (mode == "external_dicts") spec.mode = agents::MeshMode::external_dicts;
                else if (mode == "gmsh_script") spec.mode = agents::MeshMode::gmsh_script;
                else spec.mode = agents::MeshMode::native;
            } else {
                spec = agents::select_mesh_mode(state.user_requirement, {});
            }
            if (config.contains("source_path")) {
                spec.source_path = fs::path(config["source_path"].get<std::string>());
            }
            if (config.contains("boundary_names")) {
                spec.boundary_names =
                    config["boundary_names"].get<std::vector<std::string>>();
            }
            auto artifacts = agents::prepare_mesh(state, spec, *provider_, env_, ctx);
            save_case(state, ctx);
            workspace_.materialize(state);
            return json{{"mode", agents::mesh_mode_name(spec.mode)},
                        {"commands", artifacts.commands}};
        });
        return json{{"job_id", job_id}};
    }

    if (name == "generate_hpc_script") {
        auto state = load_case(args.at("case_id").get<std::string>());
        auto ctx = load_context(state.case_id);
        const json& cfg = args.at("hpc_config");
        agents::HpcConfig hpc;
        hpc.cluster_name = cfg.value("cluster_name", "");
        hpc.account = cfg.value("account", "");
        hpc.nodes = cfg.value("nodes", 1);
        hpc.tasks = cfg.value("tasks", 32);
        hpc.walltime = cfg.value("walltime", "02:00:00");
        if (cfg.contains("partition_hints")) {
            hpc.partition_hints = cfg["partition_hints"].get<std::vector<std::string>>();
        }
        hpc.case_dir = "./" + state.case_id;
        std::string script = agents::generate_hpc_script(state, hpc, env_);
        save_case(state, ctx);
        workspace_.materialize(state);
        return json{{"script_content", script}};
    }

    if (name == "run_simulation") {
        const std::string case_id = args.at("case_id").get<std::string>();
        load_case(case_id);
        std::string job_id = jobs_.enqueue(JobKind::simulation, case_id, [this, case_id] {
            auto state = load_case(case_id);
            auto ctx = load_context(case_id);
            workspace_.materialize(state);
            const fs::path case_dir = workspace_.case_files_dir(case_id);
            executor_->prepare(case_dir);
            exec::ExecutionResult result = executor_->run(case_dir);
            state.execution_logs = exec::render_logs(result.logs);
            const bool failed = result.status == exec::ExecStatus::failure ||
                                exec::indicates_failure(result);
            if (failed) {
                state.run_status = core::RunStatus::failure;
                core::AttemptRecord attempt;
                attempt.attempt_number = static_cast<int>(state.history.size()) + 1;
                attempt.file_snapshot = state.foamfiles;
                attempt.error_logs = state.execution_logs;
                state.history.push_back(std::move(attempt));
            } else {
                state.run_status = core::RunStatus::success;
            }
            save_case(state, ctx);
            json logs = json::object();
            for (const auto& [log_name, text] : result.logs) logs[log_name] = text;
            return json{{"status", failed ? "failure" : "success"}, {"logs", logs}};
        });
        return json{{"job_id", job_id}};
    }

    if (name == "check_job_status") {
        JobRecord record = jobs_.get(args.at("job_id").get<std::string>());
        return json{{"status",
                     {{"state", record.status},
                      {"kind", job_kind_name(record.kind)},
                      {"case_id", record.case_id}}}};
    }

    if (name == "get_simulation_logs") {
        const std::string case_id = args.at("case_id").get<std::string>();
        load_case(case_id);
        JobRecord record = jobs_.get(args.at("job_id").get<std::string>());
        if (record.case_id != case_id) {
            throw UnknownJob(record.job_id + " does not belong to " + case_id);
        }
        json logs = json::object();
        if (record.result_summary.contains("logs")) logs = record.result_summary["logs"];
        return json{{"logs", logs}};
    }

    if (name == "review_and_suggest_fix") {
        auto state = load_case(args.at("case_id").get<std::string>());
        auto ctx = load_context(state.case_id);
        state.run_status = core::RunStatus::failure;
        state.execution_logs = args.at("logs").get<std::string>();
        if (state.history.empty() ||
            state.history.back().error_logs != state.execution_logs) {
            core::AttemptRecord attempt;
            attempt.attempt_number = static_cast<int>(state.history.size()) + 1;
            attempt.file_snapshot = state.foamfiles;
            attempt.error_logs = state.execution_logs;
            state.history.push_back(std::move(attempt));
        }
        auto analysis = agents::review(state, *provider_, env_, ctx);
        state.history.back().review_analysis = analysis.analysis_text;
        save_case(state, ctx);
        json mods = json::array();
        for (const auto& f : analysis.proposed_modifications) {
            mods.push_back(json{{"file", f.file_name},
                                {"folder", f.folder_name},
                                {"content", f.content}});
        }
        return json{{"suggestions",
                     {{"analysis", analysis.analysis_text}, {"modifications", mods}}}};
    }

    if (name == "apply_fix") {
        auto state = load_case(args.at("case_id").get<std::string>());
        auto ctx = load_context(state.case_id);
        std::vector<core::FoamFile> mods;
        for (const auto& m : args.at("modifications")) {
            core::FoamFile f{m.at("file").get<std::string>(),
                             m.at("folder").get<std::string>(),
                             m.at("content").get<std::string>()};
            if (f.folder_name == "." || f.folder_name == "root") f.folder_name.clear();
            mods.push_back(std::move(f));
        }
        agents::apply_modifications(state, mods);
        save_case(state, ctx);
        workspace_.materialize(state);
        return json{{"status", "ok"}};
    }

    if (name == "generate_visualization") {
        const std::string case_id = args.at("case_id").get<std::string>();
        load_case(case_id);
        const std::string quantity = args.at("quantity").get<std::string>();
        std::string job_id =
            jobs_.enqueue(JobKind::visualization, case_id, [this, case_id, quantity] {
                auto state = load_case(case_id);
                const fs::path case_dir = workspace_.case_files_dir(case_id);
                auto images = agents::visualize(state, *provider_, *executor_, env_,
                                                case_dir, quantity);
                json paths = json::array();
                for (const auto& p : images) paths.push_back(p.string());
                return json{{"images", paths}};
            });
        return json{{"job_id", job_id}};
    }

    throw UnknownTool(name);
}

// ---------------------------------------------------------------------------
// JSON-RPC wiring
// ---------------------------------------------------------------------------

namespace {

json rpc_error(const json& id, int code, const std::string& message, json data = {}) {
    json err{{"code", code}, {"message", message}};
    if (!data.is_null() && !data.empty()) err["data"] = data;
    return json{{"jsonrpc", "2.0"}, {"id", id}, {"error", err}};
}

json rpc_result(const json& id, json result) {
    return json{{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
}

}  // namespace

json McpService::handle_rpc(const json& request) {
    const json id = request.contains("id") ? request["id"] : json(nullptr);
    if (!request.contains("method") || !request["method"].is_string()) {
        return rpc_error(id, -32600, "invalid request: missing method");
    }
    const std::string method = request["method"].get<std::string>();
    const json params = request.value("params", json::object());

    try {
        if (method == "initialize") {
            return rpc_result(id, json{
                {"protocolVersion", "2024-11-05"},
                {"serverInfo", {{"name", "foamforge"}, {"version", "0.1.0"}}},
                {"capabilities", {{"tools", json::object()}}},
            });
        }
        if (method == "tools/list") {
            json tools = json::array();
            for (const auto& t : tools_) {
                tools.push_back(json{{"name", t.name},
                                     {"description", t.documentation},
                                     {"inputSchema", t.input_schema},
                                     {"outputSchema", t.output_schema}});
            }
            return rpc_result(id, json{{"tools", tools}});
        }
        if (method == "tools/call") {
            if (!params.contains("name") || !params["name"].is_string()) {
                return rpc_error(id, -32602, "tools/call needs params.name");
            }
            const json args = params.value("arguments", json::object());
            json result = handle_call(params["name"].get<std::string>(), args);
            return rpc_result(id, json{
                {"content", json::array({json{{"type", "text"}, {"text", result.dump()}}})},
                {"structuredContent", result},
                {"isError", false},
            });
        }
        return rpc_error(id, -32601, "unknown method: " + method);
    } catch (const UnknownTool& e) {
        return rpc_error(id, -32601, e.what());
    } catch (const SchemaViolation& e) {
        return rpc_error(id, -32602, e.what());
    } catch (const UnknownCase& e) {
        return rpc_error(id, -32001, e.what(), json{{"kind", "unknown_case"}});
    } catch (const UnknownJob& e) {
        return rpc_error(id, -32002, e.what(), json{{"kind", "unknown_job"}});
    } catch (const Error& e) {
        return rpc_error(id, -32000, e.what(), json{{"kind", "engine_error"}});
    } catch (const std::exception& e) {
        return rpc_error(id, -32603, std::string("internal error: ") + e.what());
    }
}

bool read_framed_message(std::istream& in, std::string& body) {
    std::size_t content_length = 0;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (saw_header) break;
            continue;  // stray blank line between messages
        }
        const std::string prefix = "Content-Length:";
        if (line.rfind(prefix, 0) == 0) {
            content_length = static_cast<std::size_t>(
                std::stoul(line.substr(prefix.size())));
            saw_header = true;
        }
        // other headers (Content-Type) are ignored
    }
    if (!saw_header || content_length == 0) return false;
    body.resize(content_length);
    in.read(body.data(), static_cast<std::streamsize>(content_length));
    return static_cast<std::size_t>(in.gcount()) == content_length;
}

void write_framed_message(std::ostream& out, const std::string& body) {
    out << "Content-Length: " << body.size() << "\r\n\r\n" << body;
    out.flush();
}

void McpService::serve_stdio(std::istream& in, std::ostream& out) {
    std::string body;
    while (read_framed_message(in, body)) {
        json request;
        try {
            request = json::parse(body);
        } catch (const json::exception& e) {
            write_framed_message(
                out, rpc_error(nullptr, -32700, std::string("parse error: ") + e.what())
                         .dump());
            continue;
        }
        write_framed_message(out, handle_rpc(request).dump());
    }
}

}  // namespace foamforge::mcp
