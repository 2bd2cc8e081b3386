#include "foamforge/engine/workflow.hpp"

#include <cctype>
#include <fstream>
#include <set>

#include "foamforge/core/error.hpp"
#include "foamforge/dict/lint.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace foamforge::engine {

using core::CaseState;
using core::Config;
using core::RunStatus;

std::string node_name(Node n) {
    switch (n) {
        case Node::architect: return "architect";
        case Node::meshing: return "meshing";
        case Node::input_writer: return "input_writer";
        case Node::runner: return "runner";
        case Node::reviewer: return "reviewer";
        case Node::visualization: return "visualization";
        case Node::end: return "end";
    }
    return "end";
}

json TraceEvent::to_json() const {
    return json{{"timestamp", timestamp},
                {"node", node},
                {"event_kind", event_kind},
                {"payload", payload}};
}

TraceEvent TraceEvent::from_json(const json& j) {
    TraceEvent e;
    e.timestamp = j.at("timestamp").get<std::int64_t>();
    e.node = j.at("node").get<std::string>();
    e.event_kind = j.at("event_kind").get<std::string>();
    e.payload = j.value("payload", json::object());
    return e;
}

TraceSink::TraceSink(fs::path file) : file_(std::move(file)) {
    if (!file_.empty()) {
        fs::create_directories(file_.parent_path());
        std::ofstream out(file_, std::ios::trunc);  // fresh trace per run
    }
}

void TraceSink::emit(Node node, const std::string& kind, json payload) {
    TraceEvent e;
    e.timestamp = tick_++;
    e.node = node_name(node);
    e.event_kind = kind;
    e.payload = std::move(payload);
    if (!file_.empty()) {
        std::ofstream out(file_, std::ios::app);
        out << e.to_json().dump() << "\n";
    }
    events_.push_back(std::move(e));
}

std::vector<TraceEvent> TraceSink::replay(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open trace file: " + file.string());
    std::vector<TraceEvent> events;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        events.push_back(TraceEvent::from_json(json::parse(line)));
    }
    return events;
}

std::vector<std::string> TraceSink::node_sequence(const std::vector<TraceEvent>& events) {
    std::vector<std::string> seq;
    for (const auto& e : events) {
        if (e.event_kind == "entered") seq.push_back(e.node);
    }
    return seq;
}

std::string request_hash(const llm::CompletionRequest& request) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    };
    mix(request.system_prompt);
    mix(request.user_prompt);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool wants_visualization(const std::string& requirement) {
    std::string lower;
    lower.reserve(requirement.size());
    for (char c : requirement) {
        lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    for (const char* marker : {"visual", "plot", "contour", ".png", "paraview", "pyvista"}) {
        if (lower.find(marker) != std::string::npos) return true;
    }
    return false;
}

Node route_next(Node from, const CaseState& state, const Config& config,
                bool visualization_requested) {
    switch (from) {
        case Node::architect: return Node::meshing;
        case Node::meshing: return Node::input_writer;
        case Node::input_writer: return Node::runner;
        case Node::runner:
            if (state.run_status == RunStatus::success) {
                return visualization_requested ? Node::visualization : Node::end;
            }
            if (!config.reviewer_enabled) return Node::end;
            return state.loop_count < config.max_loops ? Node::reviewer : Node::end;
        case Node::reviewer:
            return state.loop_count < config.max_loops ? Node::runner : Node::end;
        case Node::visualization: return Node::end;
        case Node::end: return Node::end;
    }
    return Node::end;
}

namespace {

/// Provider decorator emitting one provider_call trace event per request.
class TracingProvider : public llm::Provider {
public:
    TracingProvider(std::shared_ptr<llm::Provider> inner, TraceSink& trace, const Node* node)
        : inner_(std::move(inner)), trace_(trace), node_(node) {}

    llm::CompletionResult complete(const llm::CompletionRequest& request) override {
        trace_.emit(*node_, "provider_call",
                    json{{"template_id", request.template_id.value_or("")},
                         {"request_hash", request_hash(request)}});
        return inner_->complete(request);
    }

    std::vector<float> embed(const std::string& text) override { return inner_->embed(text); }
    int dim() const override { return inner_->dim(); }

private:
    std::shared_ptr<llm::Provider> inner_;
    TraceSink& trace_;
    const Node* node_;
};

struct EngineRun {
    const Config& config;
    const WorkflowDeps& deps;
    core::Workspace workspace;
    CaseState state;
    agents::WorkflowContext ctx;
    TraceSink trace;
    llm::TokenMeter meter;
    Node current = Node::architect;
    bool vis_requested = false;

    EngineRun(const Config& cfg, const WorkflowDeps& d)
        : config(cfg), deps(d), workspace(d.workdir) {}
};

void enter(EngineRun& run, Node node) {
    run.current = node;
    run.trace.emit(node, "entered");
}

void exit_node(EngineRun& run, Node node) {
    run.state.token_usage = run.meter.total();
    run.trace.emit(node, "exited",
                   json{{"run_status", core::run_status_name(run.state.run_status)},
                        {"loop_count", run.state.loop_count},
                        {"history_length", run.state.history.size()}});
}

void record_failure(EngineRun& run, Node node, const std::string& what) {
    run.state.run_status = RunStatus::failure;
    if (!run.state.execution_logs.empty()) run.state.execution_logs += "\n";
    run.state.execution_logs += "[engine] " + node_name(node) + " failed: " + what;
    run.trace.emit(node, "state_delta", json{{"error", what}});
}

void run_runner(EngineRun& run) {
    run.workspace.materialize(run.state);
    const fs::path case_dir = run.workspace.case_files_dir(run.state.case_id);

    run.deps.executor->prepare(case_dir);
    run.trace.emit(Node::runner, "executor_call", json{{"action", "prepare"}});
    exec::ExecutionResult result = run.deps.executor->run(case_dir);
    run.trace.emit(Node::runner, "executor_call",
                   json{{"action", "run"},
                        {"status", result.status == exec::ExecStatus::success ? "success"
                                                                              : "failure"}});

    // Persist captured logs under <case>/logs/.
    const fs::path logs_dir = run.workspace.logs_dir(run.state.case_id);
    fs::create_directories(logs_dir);
    for (const auto& [name, text] : result.logs) {
        core::write_text_file(logs_dir / name, text);
    }

    const bool failed =
        result.status == exec::ExecStatus::failure || exec::indicates_failure(result);
    run.state.execution_logs = exec::render_logs(result.logs);
    if (failed) {
        run.state.run_status = RunStatus::failure;
        auto errors = exec::extract_errors(result);
        json error_list = json::array();
        for (const auto& e : errors) {
            error_list.push_back(json{{"location", e.location},
                                      {"severity", core::severity_name(e.severity)}});
        }
        core::AttemptRecord attempt;
        attempt.attempt_number = static_cast<int>(run.state.history.size()) + 1;
        attempt.file_snapshot = run.state.foamfiles;
        attempt.error_logs = run.state.execution_logs;
        run.state.history.push_back(std::move(attempt));
        run.trace.emit(Node::runner, "state_delta",
                       json{{"run_status", "failure"}, {"errors", error_list}});
    } else {
        run.state.run_status = RunStatus::success;
        run.trace.emit(Node::runner, "state_delta", json{{"run_status", "success"}});
    }
}

void run_reviewer(EngineRun& run, agents::AgentEnv& env, llm::Provider& provider) {
    agents::ReviewAnalysis analysis = agents::review(run.state, provider, env, run.ctx);
    if (!run.state.history.empty()) {
        run.state.history.back().review_analysis = analysis.analysis_text;
    }
    agents::apply_modifications(run.state, analysis.proposed_modifications);

    // Re-lint the corrected files; findings feed the next reviewer context.
    std::set<std::string> boundaries(run.ctx.boundary_names.begin(),
                                     run.ctx.boundary_names.end());
    auto report = dict::lint_case(run.state.foamfiles, run.state.descriptor, boundaries);
    json lint = json::array();
    for (const auto& issue : report.issues) {
        const std::string line = dict::inconsistency_kind_name(issue.kind) + ": " + issue.detail;
        run.ctx.lint_log.push_back(line);
        lint.push_back(line);
    }

    run.state.loop_count += 1;
    if (run.state.loop_count > run.config.max_loops) {
        throw Error("loop_count exceeded max_loops");  // invariant, never expected
    }
    run.trace.emit(Node::reviewer, "state_delta",
                   json{{"loop_count", run.state.loop_count},
                        {"modified_files", analysis.proposed_modifications.size()},
                        {"lint", lint}});
}

}  // namespace

WorkflowOutcome run_workflow(const std::string& requirement,
                             const std::vector<fs::path>& attachments, const Config& config,
                             const WorkflowDeps& deps) {
    config.validate();
    if (!deps.provider || !deps.executor || !deps.indices || !deps.prompts || !deps.schemas ||
        !deps.vocab) {
        throw ConfigError("run_workflow requires provider, executor, indices, prompts, "
                          "schemas, and vocab");
    }

    EngineRun run(config, deps);
    run.state.case_id = deps.case_id.empty() ? "case-" + request_hash({requirement, "", 0.0})
                                             : deps.case_id;
    run.state.user_requirement = requirement;
    run.vis_requested = wants_visualization(requirement);
    run.workspace.init_case(run.state.case_id);
    run.trace = TraceSink(run.workspace.trace_path(run.state.case_id));

    auto provider = std::make_shared<llm::MeteredProvider>(deps.provider, run.meter);
    TracingProvider traced(provider, run.trace, &run.current);

    agents::AgentEnv env;
    env.prompts = deps.prompts;
    env.schemas = deps.schemas;
    env.vocab = deps.vocab;
    env.config = config;

    Node node = Node::architect;
    while (node != Node::end) {
        enter(run, node);
        try {
            switch (node) {
                case Node::architect:
                    agents::architect_plan(run.state, *deps.indices, traced, env, run.ctx);
                    break;
                case Node::meshing: {
                    agents::MeshSpec spec = agents::select_mesh_mode(requirement, attachments);
                    agents::prepare_mesh(run.state, spec, traced, env, run.ctx);
                    run.trace.emit(Node::meshing, "state_delta",
                                   json{{"mode", agents::mesh_mode_name(spec.mode)},
                                        {"commands", run.ctx.mesh_commands}});
                    break;
                }
                case Node::input_writer:
                    agents::write_inputs(run.state, *deps.indices, traced, env, run.ctx);
                    break;
                case Node::runner:
                    run_runner(run);
                    break;
                case Node::reviewer:
                    run_reviewer(run, env, traced);
                    break;
                case Node::visualization: {
                    const fs::path case_dir = run.workspace.case_files_dir(run.state.case_id);
                    auto images =
                        agents::visualize(run.state, traced, *deps.executor, env, case_dir);
                    json paths = json::array();
                    for (const auto& p : images) paths.push_back(p.string());
                    run.trace.emit(Node::visualization, "state_delta", json{{"images", paths}});
                    break;
                }
                case Node::end:
                    break;
            }
        } catch (const Error& e) {
            record_failure(run, node, e.what());
            exit_node(run, node);
            break;
        }
        exit_node(run, node);
        node = route_next(node, run.state, config, run.vis_requested);
    }

    run.trace.emit(Node::end, "entered");
    run.state.token_usage = run.meter.total();
    run.trace.emit(Node::end, "exited",
                   json{{"run_status", core::run_status_name(run.state.run_status)},
                        {"loop_count", run.state.loop_count},
                        {"token_usage", run.state.token_usage}});

    run.workspace.save_state(run.state);
    run.workspace.materialize(run.state);
    core::write_text_file(run.workspace.case_dir(run.state.case_id) / "context.json",
                          run.ctx.to_json());

    return WorkflowOutcome{run.state, run.ctx, run.trace.events()};
}

}  // namespace foamforge::engine
