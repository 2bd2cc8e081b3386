#include "foamforge/exec/executor.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "foamforge/core/error.hpp"
#include "foamforge/core/state_io.hpp"

namespace fs = std::filesystem;

namespace foamforge::exec {

ExecutionResult ExecutionResult::ok(std::map<std::string, std::string> logs,
                                    std::map<std::string, int> exit_codes) {
    return ExecutionResult{ExecStatus::success, std::move(logs), std::move(exit_codes)};
}

ExecutionResult ExecutionResult::failed(std::map<std::string, std::string> logs,
                                        std::map<std::string, int> exit_codes) {
    return ExecutionResult{ExecStatus::failure, std::move(logs), std::move(exit_codes)};
}

// ---------------------------------------------------------------------------
// FakeExecutor
// ---------------------------------------------------------------------------

void FakeExecutor::prepare(const fs::path& case_dir) {
    std::lock_guard lock(mutex_);
    invocations_.push_back("prepare:" + case_dir.string());
}

ExecutionResult FakeExecutor::next(const std::string& what) {
    if (next_ >= script_.size()) {
        throw ScriptExhausted("fake executor exhausted after " +
                              std::to_string(script_.size()) + " results (" + what + ")");
    }
    return script_[next_++];
}

ExecutionResult FakeExecutor::run(const fs::path& case_dir) {
    std::lock_guard lock(mutex_);
    invocations_.push_back("run:" + case_dir.string());
    return next("run");
}

ExecutionResult FakeExecutor::run_command(const fs::path& case_dir, const std::string& command) {
    std::lock_guard lock(mutex_);
    invocations_.push_back("command:" + command);
    return next(command);
}

// ---------------------------------------------------------------------------
// LocalExecutor
// ---------------------------------------------------------------------------

bool LocalExecutor::real_exec_enabled() {
    const char* flag = std::getenv("FOAMFORGE_REAL_EXEC");
    return flag && std::string(flag) == "1";
}

void LocalExecutor::prepare(const fs::path& case_dir) {
    // Clean previous capture artifacts; time directories are left alone.
    if (!fs::is_directory(case_dir)) return;
    for (const auto& entry : fs::directory_iterator(case_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("log.", 0) == 0) {
            fs::remove(entry.path());
        }
    }
    fs::create_directories(case_dir / "logs");
}

ExecutionResult LocalExecutor::run_argv(const fs::path& case_dir,
                                        const std::vector<std::string>& argv,
                                        const std::string& log_name) {
    if (policy_.require_env_gate && !real_exec_enabled()) {
        throw ExecutorFailure(
            "real execution is disabled; set FOAMFORGE_REAL_EXEC=1 on a machine with the "
            "required tools installed");
    }

    const fs::path stdout_path = case_dir / (log_name + ".stdout");
    pid_t pid = ::fork();
    if (pid < 0) throw SpawnFailure("fork failed");
    if (pid == 0) {
        if (::chdir(case_dir.c_str()) != 0) _exit(127);
        FILE* out = ::freopen(stdout_path.c_str(), "w", stdout);
        if (out) ::dup2(fileno(stdout), STDERR_FILENO);
        std::vector<char*> cargv;
        for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        ::execvp(cargv[0], cargv.data());
        _exit(127);
    }

    const auto deadline = std::chrono::steady_clock::now() + policy_.time_budget;
    int status = 0;
    bool finished = false;
    while (std::chrono::steady_clock::now() < deadline) {
        pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            finished = true;
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    if (!finished) {
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        throw Timeout("command '" + argv[0] + "' exceeded the time budget of " +
                      std::to_string(policy_.time_budget.count()) + "s");
    }

    const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);

    ExecutionResult result;
    result.exit_codes[argv[0]] = exit_code;
    if (fs::exists(stdout_path)) {
        result.logs[log_name] = core::read_text_file(stdout_path);
    }
    // Capture every log.* the RunFunctions helpers produced.
    for (const auto& entry : fs::directory_iterator(case_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("log.", 0) == 0) {
            result.logs[name] = core::read_text_file(entry.path());
        }
    }
    result.status = exit_code == 0 && !indicates_failure(result) ? ExecStatus::success
                                                                 : ExecStatus::failure;
    return result;
}

ExecutionResult LocalExecutor::run(const fs::path& case_dir) {
    return run_argv(case_dir, {"./Allrun"}, "log.Allrun");
}

ExecutionResult LocalExecutor::run_command(const fs::path& case_dir, const std::string& command) {
    return run_argv(case_dir, {"/bin/sh", "-c", command}, "log.command");
}

}  // namespace foamforge::exec
