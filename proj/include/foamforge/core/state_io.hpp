#pragma once

#include <filesystem>
#include <string>

#include "foamforge/core/types.hpp"

namespace foamforge::core {

std::string run_status_name(RunStatus s);
RunStatus run_status_from_name(const std::string& name);

std::string severity_name(Severity s);
Severity severity_from_name(const std::string& name);

/// Lossless JSON round-trip for the workflow record.
std::string state_to_json(const CaseState& state);
CaseState state_from_json(const std::string& text);

/// Per-case layout under a work directory:
///   <workdir>/<case_id>/state.json          the persisted CaseState
///   <workdir>/<case_id>/case/<folder>/<file> materialized foam files
///   <workdir>/<case_id>/logs/               captured execution logs
///   <workdir>/<case_id>/trace.ndjson        workflow trace
class Workspace {
public:
    explicit Workspace(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    std::filesystem::path case_dir(const std::string& case_id) const;
    std::filesystem::path case_files_dir(const std::string& case_id) const;
    std::filesystem::path logs_dir(const std::string& case_id) const;
    std::filesystem::path state_path(const std::string& case_id) const;
    std::filesystem::path trace_path(const std::string& case_id) const;

    /// Creates the case directory skeleton.
    void init_case(const std::string& case_id) const;

    void save_state(const CaseState& state) const;
    CaseState load_state(const std::string& case_id) const;
    bool has_case(const std::string& case_id) const;

    /// Writes every foam file verbatim under case/<folder>/<file>.
    /// Shell scripts at the case root (Allrun and friends) get the
    /// executable bit.
    void materialize(const CaseState& state) const;

private:
    std::filesystem::path root_;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace foamforge::core
