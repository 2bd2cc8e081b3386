#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "foamforge/core/types.hpp"

namespace foamforge::exec {

enum class ExecStatus { success, failure };

struct ExecutionResult {
    ExecStatus status = ExecStatus::failure;
    std::map<std::string, std::string> logs;  // log file name -> content
    std::map<std::string, int> exit_codes;    // command -> exit code

    static ExecutionResult ok(std::map<std::string, std::string> logs = {},
                              std::map<std::string, int> exit_codes = {});
    static ExecutionResult failed(std::map<std::string, std::string> logs,
                                  std::map<std::string, int> exit_codes = {});
};

/// Solver-execution contract. prepare() cleans previous artifacts and
/// sets up output capture; run() executes the case's Allrun; run_command()
/// executes one auxiliary command in the case directory (mesh scripts,
/// plotting scripts).
class ExecutorContract {
public:
    virtual ~ExecutorContract() = default;
    virtual void prepare(const std::filesystem::path& case_dir) = 0;
    virtual ExecutionResult run(const std::filesystem::path& case_dir) = 0;
    virtual ExecutionResult run_command(const std::filesystem::path& case_dir,
                                        const std::string& command) = 0;
};

/// Replays scripted results and records every invocation, making
/// refinement-loop tests fully deterministic and offline. run() and
/// run_command() consume the same script queue; prepare() records only.
class FakeExecutor : public ExecutorContract {
public:
    explicit FakeExecutor(std::vector<ExecutionResult> script) : script_(std::move(script)) {}

    void prepare(const std::filesystem::path& case_dir) override;
    ExecutionResult run(const std::filesystem::path& case_dir) override;
    ExecutionResult run_command(const std::filesystem::path& case_dir,
                                const std::string& command) override;

    const std::vector<std::string>& invocations() const { return invocations_; }

private:
    ExecutionResult next(const std::string& what);

    std::mutex mutex_;
    std::vector<ExecutionResult> script_;
    std::size_t next_ = 0;
    std::vector<std::string> invocations_;
};

struct ShellPolicy {
    std::chrono::seconds time_budget{600};
    /// Real execution is gated: it runs only when FOAMFORGE_REAL_EXEC=1
    /// marks an OpenFOAM install present (or require_env_gate is false).
    bool require_env_gate = true;
};

/// Runs the Allrun script in the case directory under a time budget and
/// captures every log.* file plus stdout/stderr.
class LocalExecutor : public ExecutorContract {
public:
    explicit LocalExecutor(ShellPolicy policy = {}) : policy_(policy) {}

    void prepare(const std::filesystem::path& case_dir) override;
    ExecutionResult run(const std::filesystem::path& case_dir) override;
    ExecutionResult run_command(const std::filesystem::path& case_dir,
                                const std::string& command) override;

    static bool real_exec_enabled();

private:
    ExecutionResult run_argv(const std::filesystem::path& case_dir,
                             const std::vector<std::string>& argv, const std::string& log_name);

    ShellPolicy policy_;
};

/// The pattern-matching function E: L -> {e1..em}. Recognizes
/// --> FOAM FATAL ERROR / --> FOAM FATAL IO ERROR blocks through their
/// "FOAM exiting" terminator (fatal), --> FOAM Warning blocks (warning),
/// and synthesizes a fatal record carrying the last 50 log lines for any
/// command that exited nonzero without a recognized block. Total over
/// arbitrary text.
std::vector<core::ErrorRecord> extract_errors(const ExecutionResult& result);

/// True when the result must be treated as a failed run: a fatal record
/// exists or any exit code is nonzero. Warnings alone never fail a run.
bool indicates_failure(const ExecutionResult& result);

/// Flattens the log mapping into one reviewable text blob, each log
/// introduced by its name.
std::string render_logs(const std::map<std::string, std::string>& logs);

}  // namespace foamforge::exec
