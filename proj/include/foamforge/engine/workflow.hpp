#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "foamforge/agents/agents.hpp"
#include "foamforge/core/state_io.hpp"
#include "foamforge/core/types.hpp"
#include "foamforge/exec/executor.hpp"
#include "foamforge/llm/provider.hpp"
#include "foamforge/rag/index.hpp"
#include "json.hpp"

namespace foamforge::engine {

enum class Node { architect, meshing, input_writer, runner, reviewer, visualization, end };

std::string node_name(Node n);

/// One trace record. The timestamp is a logical tick (0, 1, 2, ...), so a
/// scripted run replays byte-identically.
struct TraceEvent {
    std::int64_t timestamp = 0;
    std::string node;
    std::string event_kind;  // entered | provider_call | executor_call | state_delta | exited
    nlohmann::json payload;

    nlohmann::json to_json() const;
    static TraceEvent from_json(const nlohmann::json& j);
};

/// Append-only trace, persisted as newline-delimited JSON. Replaying the
/// file reconstructs the node sequence and every provider request hash.
class TraceSink {
public:
    TraceSink() = default;
    explicit TraceSink(std::filesystem::path file);

    void emit(Node node, const std::string& kind, nlohmann::json payload = {});
    const std::vector<TraceEvent>& events() const { return events_; }

    static std::vector<TraceEvent> replay(const std::filesystem::path& file);
    static std::vector<std::string> node_sequence(const std::vector<TraceEvent>& events);

private:
    std::filesystem::path file_;
    std::vector<TraceEvent> events_;
    std::int64_t tick_ = 0;
};

/// Stable FNV-1a hash of a provider request, recorded in the trace.
std::string request_hash(const llm::CompletionRequest& request);

/// True when the requirement asks for post-run visualization.
bool wants_visualization(const std::string& requirement);

/// The conditional edges of the workflow graph as a pure function of the
/// originating node, run status, loop count, config, and the
/// visualization flag. Linear edges (architect -> meshing -> input_writer
/// -> runner) are fixed and not routed here.
Node route_next(Node from, const core::CaseState& state, const core::Config& config,
                bool visualization_requested);

struct WorkflowDeps {
    std::shared_ptr<llm::Provider> provider;
    std::shared_ptr<exec::ExecutorContract> executor;
    const rag::IndexSet* indices = nullptr;
    const prompts::PromptLibrary* prompts = nullptr;
    const llm::SchemaRegistry* schemas = nullptr;
    const core::VocabularySets* vocab = nullptr;
    std::filesystem::path workdir;
    std::string case_id;
};

struct WorkflowOutcome {
    core::CaseState state;
    agents::WorkflowContext context;
    std::vector<TraceEvent> trace;
};

/// Runs the full refinement loop: architect, meshing, input writer, then
/// runner/reviewer cycles until success or max_loops, then optional
/// visualization. Provider or executor errors are recorded in the state
/// and terminate the run as a failure; this function does not throw for
/// them. Throws ConfigError for invalid configuration.
WorkflowOutcome run_workflow(const std::string& requirement,
                             const std::vector<std::filesystem::path>& attachments,
                             const core::Config& config, const WorkflowDeps& deps);

}  // namespace foamforge::engine
