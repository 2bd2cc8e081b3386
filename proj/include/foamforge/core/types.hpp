#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace foamforge::core {

/// Classification of a case against the closed vocabularies (domain,
/// category, solver) plus a filesystem-safe case name.
struct CaseDescriptor {
    std::string case_name;
    std::string case_domain;
    std::string case_category;
    std::string case_solver;

    bool operator==(const CaseDescriptor&) const = default;
};

/// One file the Architect planned. `folder_name` is "system", "constant",
/// "0", or "" for the case root. Dependencies reference other planned files
/// by identifier ("<folder>/<file>", or just "<file>" for root files).
struct PlannedFile {
    std::string file_name;
    std::string folder_name;
    std::vector<std::string> dependencies;
    int priority = 0;

    std::string identifier() const {
        return folder_name.empty() ? file_name : folder_name + "/" + file_name;
    }

    bool operator==(const PlannedFile&) const = default;
};

struct SimulationPlan {
    std::vector<PlannedFile> files;
    std::string source_reference;  // name of the retrieved similar case

    bool operator==(const SimulationPlan&) const = default;
};

struct FoamFile {
    std::string file_name;
    std::string folder_name;
    std::string content;

    std::string identifier() const {
        return folder_name.empty() ? file_name : folder_name + "/" + file_name;
    }

    bool operator==(const FoamFile&) const = default;
};

enum class Severity { fatal, warning };

struct ErrorRecord {
    std::string message;
    std::string location;  // log file name or case file path
    Severity severity = Severity::fatal;

    bool operator==(const ErrorRecord&) const = default;
};

/// One failed run: the file state that produced it, the captured error
/// logs, and the reviewer's analysis of them.
struct AttemptRecord {
    int attempt_number = 0;
    std::vector<FoamFile> file_snapshot;
    std::string error_logs;
    std::string review_analysis;

    bool operator==(const AttemptRecord&) const = default;
};

enum class RunStatus { not_run, success, failure };

/// The full mutable workflow record for one case. Mutated only by the
/// workflow engine (single writer); everything inside is a value.
struct CaseState {
    std::string case_id;
    std::string user_requirement;
    CaseDescriptor descriptor;
    SimulationPlan plan;
    std::vector<FoamFile> foamfiles;
    std::string execution_logs;
    RunStatus run_status = RunStatus::not_run;
    std::vector<AttemptRecord> history;
    int loop_count = 0;
    std::int64_t token_usage = 0;

    bool operator==(const CaseState&) const = default;
};

enum class RetrievalMode { hierarchy, single_index };

enum class VisualizationBackend { pyvista, paraview };

/// Engine configuration. Defaults are the best configuration from the
/// ablation runs: reviewer on, file dependency on, max_loops 10, T=0.0,
/// hierarchical retrieval with top_k 5 and 1536-dim embeddings.
struct Config {
    int max_loops = 10;
    bool reviewer_enabled = true;
    bool file_dependency_enabled = true;
    double temperature = 0.0;
    RetrievalMode retrieval_mode = RetrievalMode::hierarchy;
    int top_k = 5;
    int embedding_dim = 1536;

    VisualizationBackend visualization_backend = VisualizationBackend::pyvista;
    int visualization_max_retries = 3;

    void validate() const;
};

/// Folder precedence used by the Input Writer: system files first, then
/// constant, then 0, then case-root auxiliary files.
int folder_rank(const std::string& folder_name);

}  // namespace foamforge::core
