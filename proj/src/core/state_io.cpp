#include "foamforge/core/state_io.hpp"

#include <fstream>
#include <sys/stat.h>

#include "foamforge/core/error.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace foamforge::core {

std::string run_status_name(RunStatus s) {
    switch (s) {
        case RunStatus::not_run: return "not_run";
        case RunStatus::success: return "success";
        case RunStatus::failure: return "failure";
    }
    return "not_run";
}

RunStatus run_status_from_name(const std::string& name) {
    if (name == "not_run") return RunStatus::not_run;
    if (name == "success") return RunStatus::success;
    if (name == "failure") return RunStatus::failure;
    throw ValidationError("unknown run status: " + name);
}

std::string severity_name(Severity s) {
    return s == Severity::fatal ? "fatal" : "warning";
}

Severity severity_from_name(const std::string& name) {
    if (name == "fatal") return Severity::fatal;
    if (name == "warning") return Severity::warning;
    throw ValidationError("unknown severity: " + name);
}

namespace {

json to_json(const FoamFile& f) {
    return json{{"file_name", f.file_name},
                {"folder_name", f.folder_name},
                {"content", f.content}};
}

FoamFile foamfile_from(const json& j) {
    return FoamFile{j.at("file_name").get<std::string>(),
                    j.at("folder_name").get<std::string>(),
                    j.at("content").get<std::string>()};
}

json to_json(const PlannedFile& f) {
    return json{{"file_name", f.file_name},
                {"folder_name", f.folder_name},
                {"dependencies", f.dependencies},
                {"priority", f.priority}};
}

PlannedFile planned_from(const json& j) {
    PlannedFile f;
    f.file_name = j.at("file_name").get<std::string>();
    f.folder_name = j.at("folder_name").get<std::string>();
    if (j.contains("dependencies"))
        f.dependencies = j.at("dependencies").get<std::vector<std::string>>();
    if (j.contains("priority")) f.priority = j.at("priority").get<int>();
    return f;
}

}  // namespace

std::string state_to_json(const CaseState& state) {
    json files = json::array();
    for (const auto& f : state.foamfiles) files.push_back(to_json(f));

    json plan_files = json::array();
    for (const auto& f : state.plan.files) plan_files.push_back(to_json(f));

    json history = json::array();
    for (const auto& a : state.history) {
        json snapshot = json::array();
        for (const auto& f : a.file_snapshot) snapshot.push_back(to_json(f));
        history.push_back(json{{"attempt_number", a.attempt_number},
                               {"file_snapshot", snapshot},
                               {"error_logs", a.error_logs},
                               {"review_analysis", a.review_analysis}});
    }

    json doc{
        {"case_id", state.case_id},
        {"user_requirement", state.user_requirement},
        {"descriptor",
         {{"case_name", state.descriptor.case_name},
          {"case_domain", state.descriptor.case_domain},
          {"case_category", state.descriptor.case_category},
          {"case_solver", state.descriptor.case_solver}}},
        {"plan", {{"files", plan_files}, {"source_reference", state.plan.source_reference}}},
        {"foamfiles", files},
        {"execution_logs", state.execution_logs},
        {"run_status", run_status_name(state.run_status)},
        {"history", history},
        {"loop_count", state.loop_count},
        {"token_usage", state.token_usage},
    };
    return doc.dump(2) + "\n";
}

CaseState state_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed state document: ") + e.what());
    }

    CaseState s;
    s.case_id = doc.at("case_id").get<std::string>();
    s.user_requirement = doc.at("user_requirement").get<std::string>();
    const auto& d = doc.at("descriptor");
    s.descriptor = CaseDescriptor{d.at("case_name").get<std::string>(),
                                  d.at("case_domain").get<std::string>(),
                                  d.at("case_category").get<std::string>(),
                                  d.at("case_solver").get<std::string>()};
    const auto& p = doc.at("plan");
    for (const auto& f : p.at("files")) s.plan.files.push_back(planned_from(f));
    s.plan.source_reference = p.at("source_reference").get<std::string>();
    for (const auto& f : doc.at("foamfiles")) s.foamfiles.push_back(foamfile_from(f));
    s.execution_logs = doc.at("execution_logs").get<std::string>();
    s.run_status = run_status_from_name(doc.at("run_status").get<std::string>());
    for (const auto& a : doc.at("history")) {
        AttemptRecord rec;
        rec.attempt_number = a.at("attempt_number").get<int>();
        for (const auto& f : a.at("file_snapshot")) rec.file_snapshot.push_back(foamfile_from(f));
        rec.error_logs = a.at("error_logs").get<std::string>();
        rec.review_analysis = a.at("review_analysis").get<std::string>();
        s.history.push_back(std::move(rec));
    }
    s.loop_count = doc.at("loop_count").get<int>();
    s.token_usage = doc.at("token_usage").get<std::int64_t>();
    return s;
}

Workspace::Workspace(fs::path root) : root_(std::move(root)) {}

fs::path Workspace::case_dir(const std::string& case_id) const { return root_ / case_id; }

fs::path Workspace::case_files_dir(const std::string& case_id) const {
    return root_ / case_id / "case";
}

fs::path Workspace::logs_dir(const std::string& case_id) const {
    return root_ / case_id / "logs";
}

fs::path Workspace::state_path(const std::string& case_id) const {
    return root_ / case_id / "state.json";
}

fs::path Workspace::trace_path(const std::string& case_id) const {
    return root_ / case_id / "trace.ndjson";
}

void Workspace::init_case(const std::string& case_id) const {
    fs::create_directories(case_files_dir(case_id));
    fs::create_directories(logs_dir(case_id));
}

void Workspace::save_state(const CaseState& state) const {
    init_case(state.case_id);
    write_text_file(state_path(state.case_id), state_to_json(state));
}

CaseState Workspace::load_state(const std::string& case_id) const {
    const auto path = state_path(case_id);
    if (!fs::exists(path)) throw UnknownCase(case_id);
    return state_from_json(read_text_file(path));
}

bool Workspace::has_case(const std::string& case_id) const {
    return fs::exists(state_path(case_id));
}

void Workspace::materialize(const CaseState& state) const {
    const auto base = case_files_dir(state.case_id);
    for (const auto& f : state.foamfiles) {
        fs::path target =
            f.folder_name.empty() ? base / f.file_name : base / f.folder_name / f.file_name;
        fs::create_directories(target.parent_path());
        write_text_file(target, f.content);
        if (f.folder_name.empty() &&
            (f.file_name.rfind("All", 0) == 0 || f.file_name.rfind(".sh") != std::string::npos)) {
            ::chmod(target.c_str(), 0755);
        }
    }
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path.string());
    out << content;
}

}  // namespace foamforge::core
