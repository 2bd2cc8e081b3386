#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "foamforge/agents/agents.hpp"
#include "foamforge/core/state_io.hpp"
#include "foamforge/core/types.hpp"
#include "foamforge/exec/executor.hpp"
#include "foamforge/llm/provider.hpp"
#include "foamforge/rag/index.hpp"
#include "json.hpp"

namespace foamforge::mcp {

struct ToolDescriptor {
    std::string name;
    nlohmann::json input_schema;
    nlohmann::json output_schema;
    std::string documentation;
};

/// The eleven atomic tool functions of the protocol surface.
std::vector<ToolDescriptor> register_tools();

enum class JobKind { mesh, simulation, visualization };

std::string job_kind_name(JobKind k);

struct JobRecord {
    std::string job_id;
    JobKind kind = JobKind::simulation;
    std::string case_id;
    std::string status = "pending";  // pending -> running -> succeeded | failed
    nlohmann::json result_summary;
};

/// Asynchronous job lifecycle store. In deterministic mode a job advances
/// one lifecycle step per status poll and its work runs synchronously on
/// the second poll, which makes wire transcripts reproducible. Otherwise
/// a bounded worker pool executes jobs in the background. get() never
/// blocks on job completion.
class JobStore {
public:
    explicit JobStore(bool deterministic, int workers = 2);
    ~JobStore();

    std::string enqueue(JobKind kind, const std::string& case_id,
                        std::function<nlohmann::json()> work);

    /// Non-blocking snapshot; in deterministic mode this is also the poll
    /// that advances the job. Throws UnknownJob.
    JobRecord get(const std::string& job_id);

    std::vector<JobRecord> list(const std::string& case_id = "") const;

private:
    struct Slot {
        JobRecord record;
        std::function<nlohmann::json()> work;
        int polls = 0;
    };

    void worker_loop();
    void execute(std::unique_lock<std::mutex>& lock, const std::string& job_id);

    bool deterministic_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    bool stopping_ = false;
    int next_id_ = 1;
    std::map<std::string, Slot> jobs_;
    std::deque<std::string> queue_;
    std::vector<std::thread> workers_;
};

struct ServiceOptions {
    bool deterministic_jobs = true;
    int workers = 2;
};

/// Tool dispatcher plus JSON-RPC wiring. Case state persists across calls
/// keyed by case_id; each call is atomic: a failed call leaves the case
/// state unchanged apart from its own error.
class McpService {
public:
    McpService(std::filesystem::path workdir, std::shared_ptr<llm::Provider> provider,
               std::shared_ptr<exec::ExecutorContract> executor, const rag::IndexSet* indices,
               const prompts::PromptLibrary* prompts, const llm::SchemaRegistry* schemas,
               const core::VocabularySets* vocab, core::Config config,
               ServiceOptions options = {});

    const std::vector<ToolDescriptor>& tools() const { return tools_; }

    /// Validates args against the tool's input schema, runs it, and
    /// validates the result against the output schema. Throws UnknownTool,
    /// SchemaViolation, UnknownCase, UnknownJob.
    nlohmann::json handle_call(const std::string& name, const nlohmann::json& args);

    /// Full JSON-RPC 2.0 handling: initialize, tools/list, tools/call.
    /// Always returns a response object; errors are structured.
    nlohmann::json handle_rpc(const nlohmann::json& request);

    /// Content-Length framed JSON-RPC over the given streams until EOF.
    void serve_stdio(std::istream& in, std::ostream& out);

private:
    nlohmann::json dispatch(const std::string& name, const nlohmann::json& args);

    core::CaseState load_case(const std::string& case_id);
    agents::WorkflowContext load_context(const std::string& case_id);
    void save_case(const core::CaseState& state, const agents::WorkflowContext& ctx);
    std::string fresh_case_id();

    core::Workspace workspace_;
    std::shared_ptr<llm::Provider> provider_;
    std::shared_ptr<exec::ExecutorContract> executor_;
    const rag::IndexSet* indices_;
    agents::AgentEnv env_;
    std::vector<ToolDescriptor> tools_;
    JobStore jobs_;
    std::mutex mutex_;  // serializes tool dispatch per service
    int case_counter_ = 0;
};

/// Reads one Content-Length framed message; false at EOF.
bool read_framed_message(std::istream& in, std::string& body);
void write_framed_message(std::ostream& out, const std::string& body);

}  // namespace foamforge::mcp
