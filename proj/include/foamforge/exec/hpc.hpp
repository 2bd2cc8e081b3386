#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>

namespace foamforge::exec {

enum class JobState { pending, running, completed, failed };

std::string job_state_name(JobState s);

/// Scheduler submission contract. Implementations must tolerate
/// concurrent status polls.
class JobSubmitter {
public:
    virtual ~JobSubmitter() = default;
    virtual std::string submit(const std::string& script_text,
                               const std::filesystem::path& workdir) = 0;
    virtual JobState status(const std::string& job_id) = 0;
};

/// In-memory queue that advances one lifecycle step per status poll:
/// pending -> running -> completed (or failed when fail_jobs is set).
class StubSubmitter : public JobSubmitter {
public:
    explicit StubSubmitter(int advance_per_poll = 1, bool fail_jobs = false)
        : advance_per_poll_(advance_per_poll), fail_jobs_(fail_jobs) {}

    std::string submit(const std::string& script_text,
                       const std::filesystem::path& workdir) override;
    JobState status(const std::string& job_id) override;

private:
    std::mutex mutex_;
    int advance_per_poll_;
    bool fail_jobs_;
    int next_id_ = 1;
    std::map<std::string, int> progress_;  // job_id -> polls observed
};

/// Shell adapter using the scheduler's sbatch/squeue command conventions.
class SlurmSubmitter : public JobSubmitter {
public:
    std::string submit(const std::string& script_text,
                       const std::filesystem::path& workdir) override;
    JobState status(const std::string& job_id) override;

    /// Parses "Submitted batch job 12345" -> "12345". Exposed for tests.
    static std::string parse_sbatch_output(const std::string& output);
    /// Maps squeue/sacct state words (PENDING, RUNNING, COMPLETED, ...)
    /// onto the JobState lifecycle.
    static JobState parse_state_word(const std::string& word);
};

/// Submits the script through the given submitter and returns the job id.
/// Throws ValidationError on an empty script.
std::string hpc_submit(const std::string& script_text, JobSubmitter& submitter,
                       const std::filesystem::path& workdir = ".");

JobState hpc_status(const std::string& job_id, JobSubmitter& submitter);

}  // namespace foamforge::exec
