#include "foamforge/exec/hpc.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "foamforge/core/error.hpp"

namespace fs = std::filesystem;

namespace foamforge::exec {

std::string job_state_name(JobState s) {
    switch (s) {
        case JobState::pending: return "pending";
        case JobState::running: return "running";
        case JobState::completed: return "completed";
        case JobState::failed: return "failed";
    }
    return "pending";
}

std::string StubSubmitter::submit(const std::string& script_text, const fs::path&) {
    if (script_text.empty()) throw ValidationError("cannot submit an empty script");
    std::lock_guard lock(mutex_);
    std::string job_id = "stub-" + std::to_string(next_id_++);
    progress_[job_id] = 0;
    return job_id;
}

JobState StubSubmitter::status(const std::string& job_id) {
    std::lock_guard lock(mutex_);
    auto it = progress_.find(job_id);
    if (it == progress_.end()) throw UnknownJob(job_id);
    const int polls = ++it->second;
    const int steps = (polls - 1) / std::max(1, advance_per_poll_) + 1;
    if (steps <= 1) return JobState::pending;
    if (steps == 2) return JobState::running;
    return fail_jobs_ ? JobState::failed : JobState::completed;
}

namespace {

std::string run_capture(const std::string& command) {
    std::array<char, 256> buffer{};
    std::string output;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) throw SpawnFailure("popen failed for: " + command);
    while (::fgets(buffer.data(), static_cast<int>(buffer.size()), pipe)) {
        output += buffer.data();
    }
    ::pclose(pipe);
    return output;
}

}  // namespace

std::string SlurmSubmitter::parse_sbatch_output(const std::string& output) {
    // sbatch prints "Submitted batch job <id>" on success.
    const std::string marker = "Submitted batch job ";
    auto pos = output.find(marker);
    if (pos == std::string::npos) {
        throw ExecutorFailure("unexpected sbatch output: " + output);
    }
    std::string id;
    for (std::size_t i = pos + marker.size(); i < output.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(output[i]))) break;
        id += output[i];
    }
    if (id.empty()) throw ExecutorFailure("sbatch output carries no job id: " + output);
    return id;
}

JobState SlurmSubmitter::parse_state_word(const std::string& word) {
    if (word.rfind("PENDING", 0) == 0 || word.rfind("PD", 0) == 0) return JobState::pending;
    if (word.rfind("RUNNING", 0) == 0 || word.rfind("R", 0) == 0 ||
        word.rfind("COMPLETING", 0) == 0) {
        return JobState::running;
    }
    if (word.rfind("COMPLETED", 0) == 0 || word.rfind("CD", 0) == 0) return JobState::completed;
    return JobState::failed;  // FAILED, CANCELLED, TIMEOUT, NODE_FAIL, ...
}

std::string SlurmSubmitter::submit(const std::string& script_text, const fs::path& workdir) {
    const fs::path script_path = workdir / "submit.slurm";
    std::ofstream out(script_path);
    if (!out) throw ExecutorFailure("cannot write " + script_path.string());
    out << script_text;
    out.close();
    return parse_sbatch_output(run_capture("cd " + workdir.string() + " && sbatch submit.slurm"));
}

JobState SlurmSubmitter::status(const std::string& job_id) {
    std::string output = run_capture("squeue -h -j " + job_id + " -o %T 2>/dev/null");
    while (!output.empty() && (output.back() == '\n' || output.back() == ' ')) output.pop_back();
    if (output.empty()) {
        // Job left the queue; ask the accounting database.
        output = run_capture("sacct -n -X -j " + job_id + " -o State 2>/dev/null");
        while (!output.empty() && (output.back() == '\n' || output.back() == ' '))
            output.pop_back();
        if (output.empty()) throw UnknownJob(job_id);
    }
    auto start = output.find_first_not_of(" \t");
    return parse_state_word(output.substr(start == std::string::npos ? 0 : start));
}

std::string hpc_submit(const std::string& script_text, JobSubmitter& submitter,
                       const fs::path& workdir) {
    if (script_text.empty()) throw ValidationError("cannot submit an empty script");
    return submitter.submit(script_text, workdir);
}

JobState hpc_status(const std::string& job_id, JobSubmitter& submitter) {
    return submitter.status(job_id);
}

}  // namespace foamforge::exec
