#include "foamforge/agents/agents.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "foamforge/core/error.hpp"
#include "foamforge/core/order.hpp"
#include "foamforge/core/state_io.hpp"
#include "foamforge/dict/dict.hpp"
#include "foamforge/dict/lint.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace foamforge::agents {

using core::CaseState;
using core::FoamFile;
using core::PlannedFile;

std::string mesh_mode_name(MeshMode m) {
    switch (m) {
        case MeshMode::native: return "native";
        case MeshMode::external_msh: return "external_msh";
        case MeshMode::external_dicts: return "external_dicts";
        case MeshMode::gmsh_script: return "gmsh_script";
    }
    return "native";
}

std::string WorkflowContext::to_json() const {
    json doc{
        {"tutorial_reference", tutorial_reference},
        {"dir_structure", dir_structure},
        {"dir_counts_str", dir_counts_str},
        {"case_info", case_info},
        {"allrun_reference", allrun_reference},
        {"mesh_commands", mesh_commands},
        {"boundary_names", boundary_names},
        {"lint_log", lint_log},
    };
    return doc.dump(2) + "\n";
}

WorkflowContext WorkflowContext::from_json(const std::string& text) {
    json doc = json::parse(text);
    WorkflowContext ctx;
    ctx.tutorial_reference = doc.value("tutorial_reference", "");
    ctx.dir_structure = doc.value("dir_structure", "");
    ctx.dir_counts_str = doc.value("dir_counts_str", "");
    ctx.case_info = doc.value("case_info", "");
    ctx.allrun_reference = doc.value("allrun_reference", "");
    ctx.mesh_commands = doc.value("mesh_commands", std::vector<std::string>{});
    ctx.boundary_names = doc.value("boundary_names", std::vector<std::string>{});
    ctx.lint_log = doc.value("lint_log", std::vector<std::string>{});
    return ctx;
}

std::string format_foamfiles(const std::vector<FoamFile>& files) {
    json arr = json::array();
    for (const auto& f : files) {
        arr.push_back(json{{"file_name", f.file_name},
                           {"folder_name", f.folder_name},
                           {"content", f.content}});
    }
    return arr.dump();
}

namespace {

llm::CompletionRequest make_request(const prompts::RenderedPrompt& rendered,
                                    const AgentEnv& env, const std::string& template_id,
                                    const std::optional<std::string>& schema_id = {}) {
    llm::CompletionRequest req;
    req.system_prompt = rendered.system_prompt;
    req.user_prompt = rendered.user_prompt;
    req.temperature = env.config.temperature;
    req.template_id = template_id;
    req.schema_id = schema_id;
    return req;
}

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool contains_word_ci(const std::string& haystack, const std::string& needle) {
    const std::string h = lowercase(haystack);
    const std::string n = lowercase(needle);
    auto is_word = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    std::size_t pos = 0;
    while ((pos = h.find(n, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word(h[pos - 1]);
        const std::size_t end = pos + n.size();
        const bool right_ok = end >= h.size() || !is_word(h[end]);
        if (left_ok && right_ok) return true;
        pos += 1;
    }
    return false;
}

std::string folder_counts_line(const rag::CaseRecord& rec) {
    std::map<std::string, int> counts;
    for (const auto& [path, _] : rec.file_contents) {
        auto slash = path.find('/');
        counts[slash == std::string::npos ? "." : path.substr(0, slash)]++;
    }
    std::ostringstream out;
    out << "Number of files per folder in the similar case:";
    for (const auto& [folder, n] : counts) out << " " << folder << ": " << n << ";";
    return out.str();
}

std::string descriptor_summary(const core::CaseDescriptor& d) {
    return "case name: " + d.case_name + ", case domain: " + d.case_domain +
           ", case category: " + d.case_category + ", case solver: " + d.case_solver;
}

}  // namespace

// ---------------------------------------------------------------------------
// Architect
// ---------------------------------------------------------------------------

void architect_plan(CaseState& state, const rag::IndexSet& indices, llm::Provider& provider,
                    const AgentEnv& env, WorkflowContext& ctx) {
    const auto& lib = *env.prompts;
    const auto& vocab = *env.vocab;

    // Requirement classification against the closed vocabularies.
    auto class_prompt = lib.render(
        "case_description",
        {{"domain_options", core::VocabularySets::format_options(vocab.domains)},
         {"category_options", core::VocabularySets::format_options(vocab.categories)},
         {"solver_options", core::VocabularySets::format_options(vocab.solvers)},
         {"user_requirement", state.user_requirement}});
    json classified = llm::complete_structured(
        provider, make_request(class_prompt, env, "case_description", "case_descriptor"),
        env.schemas->get("case_descriptor"));
    state.descriptor = core::validate_descriptor(
        core::CaseDescriptor{classified.at("case_name").get<std::string>(),
                             classified.at("case_domain").get<std::string>(),
                             classified.at("case_category").get<std::string>(),
                             classified.at("case_solver").get<std::string>()},
        vocab);
    ctx.case_info = descriptor_summary(state.descriptor);

    // Reference case retrieval: one architect-stage query, refined by the
    // file details of the retrieved cases.
    rag::RetrievalParams params;
    params.top_k = env.config.top_k;
    rag::RetrievalResult structure =
        env.config.retrieval_mode == core::RetrievalMode::hierarchy
            ? indices.retrieve(state.user_requirement, rag::Stage::architect, "", params)
            : indices.retrieve_single_index(state.user_requirement, "", params);

    ctx.tutorial_reference = structure.formatted_context;
    if (!structure.matches.empty()) {
        const std::string& top_case = structure.matches.front().payload.case_name;
        state.plan.source_reference = top_case;
        if (const rag::CaseRecord* rec = indices.record_for(top_case)) {
            ctx.dir_structure = rec->directory_structure;
            ctx.dir_counts_str = folder_counts_line(*rec);
        }
    }

    // Simulation decomposition into planned files.
    auto decomp_prompt = lib.render("task_decomposition",
                                    {{"user_requirement", state.user_requirement},
                                     {"dir_structure", ctx.dir_structure},
                                     {"dir_counts_str", ctx.dir_counts_str}});
    json decomposed = llm::complete_structured(
        provider, make_request(decomp_prompt, env, "task_decomposition", "subtasks"),
        env.schemas->get("subtasks"));

    state.plan.files.clear();
    int priority = 0;
    for (const auto& sub : decomposed.at("subtasks")) {
        PlannedFile f;
        f.file_name = sub.at("file_name").get<std::string>();
        f.folder_name = sub.at("folder_name").get<std::string>();
        if (f.folder_name == "." || f.folder_name == "root") f.folder_name.clear();
        f.priority = priority++;
        state.plan.files.push_back(std::move(f));
    }
    if (state.plan.files.empty()) {
        throw EmptyPlan("the decomposition produced no subtasks");
    }
    core::validate_plan(state.plan);
}

// ---------------------------------------------------------------------------
// Meshing
// ---------------------------------------------------------------------------

MeshSpec select_mesh_mode(const std::string& requirement,
                          const std::vector<fs::path>& attachments) {
    MeshSpec spec;

    // Boundary names are the double-quoted identifiers in the requirement.
    for (std::size_t i = 0; i < requirement.size(); ++i) {
        if (requirement[i] != '"') continue;
        auto close = requirement.find('"', i + 1);
        if (close == std::string::npos) break;
        const std::string name = requirement.substr(i + 1, close - i - 1);
        if (!name.empty() && name.size() < 64 && name.find('\n') == std::string::npos) {
            spec.boundary_names.push_back(name);
        }
        i = close;
    }

    for (const auto& a : attachments) {
        if (a.extension() == ".msh") {
            spec.mode = MeshMode::external_msh;
            spec.source_path = a;
            return spec;
        }
    }
    for (const auto& a : attachments) {
        const std::string name = a.filename().string();
        if (name == "blockMeshDict" || name == "snappyHexMeshDict") {
            spec.mode = MeshMode::external_dicts;
            spec.source_path = a;
            return spec;
        }
    }
    if (contains_word_ci(requirement, "gmsh")) {
        spec.mode = MeshMode::gmsh_script;
        return spec;
    }
    spec.mode = MeshMode::native;
    return spec;
}

namespace {

constexpr const char* kGmshScriptName = "generate_mesh.py";
constexpr const char* kGmshMeshOutput = "mesh.msh";

void plan_contains_or_add(core::SimulationPlan& plan, const std::string& file,
                          const std::string& folder) {
    for (const auto& f : plan.files) {
        if (f.file_name == file && f.folder_name == folder) return;
    }
    PlannedFile planned;
    planned.file_name = file;
    planned.folder_name = folder;
    planned.priority = static_cast<int>(plan.files.size());
    plan.files.push_back(std::move(planned));
}

void drop_from_plan(core::SimulationPlan& plan, const std::string& file,
                    const std::string& folder) {
    std::erase_if(plan.files, [&](const PlannedFile& f) {
        return f.file_name == file && f.folder_name == folder;
    });
}

}  // namespace

MeshArtifacts prepare_mesh(CaseState& state, const MeshSpec& spec, llm::Provider& provider,
                           const AgentEnv& env, WorkflowContext& ctx) {
    MeshArtifacts out;
    switch (spec.mode) {
        case MeshMode::native: {
            plan_contains_or_add(state.plan, "blockMeshDict", "system");
            if (contains_word_ci(state.user_requirement, "snappyHexMesh")) {
                plan_contains_or_add(state.plan, "snappyHexMeshDict", "system");
                out.commands = {"blockMesh", "snappyHexMesh -overwrite"};
            } else {
                out.commands = {"blockMesh"};
            }
            break;
        }
        case MeshMode::external_msh: {
            const fs::path src = *spec.source_path;
            FoamFile mesh_file{src.filename().string(), "", core::read_text_file(src)};
            out.artifacts.push_back(mesh_file);
            out.commands = {"gmshToFoam " + src.filename().string()};
            break;
        }
        case MeshMode::external_dicts: {
            const fs::path src = *spec.source_path;
            const std::string name = src.filename().string();
            FoamFile dict_file{name, "system", core::read_text_file(src)};
            out.artifacts.push_back(dict_file);
            // The provided dictionary is authoritative; never regenerate it.
            drop_from_plan(state.plan, name, "system");
            out.commands = {name == "snappyHexMeshDict" ? "blockMesh && snappyHexMesh -overwrite"
                                                        : "blockMesh"};
            break;
        }
        case MeshMode::gmsh_script: {
            std::string boundaries;
            for (const auto& b : spec.boundary_names) {
                if (!boundaries.empty()) boundaries += ", ";
                boundaries += b;
            }
            auto prompt = env.prompts->render(
                "mesh_gmsh_script", {{"user_requirement", state.user_requirement},
                                     {"boundary_names", boundaries},
                                     {"script_name", kGmshScriptName},
                                     {"mesh_output", kGmshMeshOutput}});
            auto result = provider.complete(make_request(prompt, env, "mesh_gmsh_script"));
            const std::string script = llm::strip_code_fences(result.text);
            if (script.empty()) {
                throw ProviderFailure("mesh generation returned an empty script");
            }
            out.artifacts.push_back(FoamFile{kGmshScriptName, "", script});
            out.commands = {std::string("python3 ") + kGmshScriptName,
                            std::string("gmshToFoam ") + kGmshMeshOutput};
            break;
        }
    }

    for (const auto& artifact : out.artifacts) {
        apply_modifications(state, {artifact});
    }
    ctx.mesh_commands = out.commands;
    for (const auto& b : spec.boundary_names) ctx.boundary_names.push_back(b);
    return out;
}

// ---------------------------------------------------------------------------
// Input writer
// ---------------------------------------------------------------------------

namespace {

std::string similar_file_text_for(const rag::IndexSet& indices, const std::string& case_name,
                                  const PlannedFile& planned,
                                  const rag::RetrievalResult& details) {
    if (const rag::CaseRecord* rec = indices.record_for(case_name)) {
        auto it = rec->file_contents.find(planned.identifier());
        if (it != rec->file_contents.end()) return it->second;
    }
    return details.formatted_context;
}

std::string prior_files_section(const AgentEnv& env, const std::vector<FoamFile>& written) {
    if (written.empty()) return "";
    auto rendered = env.prompts->render("file_generation_prior_files",
                                        {{"writed_files", format_foamfiles(written)}});
    return "\n" + rendered.user_prompt;
}

FoamFile generate_one(CaseState& state, const PlannedFile& planned,
                      const rag::IndexSet& indices, llm::Provider& provider,
                      const AgentEnv& env, const rag::RetrievalResult& details,
                      const std::vector<FoamFile>& written) {
    auto prompt = env.prompts->render(
        "file_generation",
        {{"file_name", planned.file_name},
         {"folder_name", planned.folder_name.empty() ? "." : planned.folder_name},
         {"solver_options", core::VocabularySets::format_options(env.vocab->solvers)},
         {"user_requirement", state.user_requirement},
         {"similar_file_text",
          similar_file_text_for(indices, state.plan.source_reference, planned, details)},
         {"prior_files_section",
          env.config.file_dependency_enabled ? prior_files_section(env, written) : ""}});

    auto result = provider.complete(make_request(prompt, env, "file_generation"));
    const std::string content = llm::strip_code_fences(result.text);
    if (content.empty()) {
        throw ProviderFailure("empty content generated for " + planned.identifier());
    }
    return FoamFile{planned.file_name, planned.folder_name, content};
}

void lint_incremental(const CaseState& state, const AgentEnv& env, WorkflowContext& ctx) {
    std::set<std::string> boundaries(ctx.boundary_names.begin(), ctx.boundary_names.end());
    auto report = dict::lint_case(state.foamfiles, state.descriptor, boundaries);
    for (const auto& failure : report.parse_failures) {
        ctx.lint_log.push_back("parse: " + failure.file + ": " + failure.message);
    }
    for (const auto& issue : report.issues) {
        ctx.lint_log.push_back(dict::inconsistency_kind_name(issue.kind) + ": " + issue.detail);
    }
}

std::string command_names(const rag::IndexSet& indices) {
    std::ostringstream out;
    bool first = true;
    for (const auto& idx : indices.index(rag::IndexKind::command_documentation).entries()) {
        if (!first) out << ", ";
        out << idx.payload.case_name;
        first = false;
    }
    return out.str();
}

std::string allrun_from(CaseState& state, const rag::IndexSet& indices,
                        llm::Provider& provider, const AgentEnv& env, WorkflowContext& ctx) {
    rag::RetrievalParams params;
    params.top_k = env.config.top_k;

    rag::RetrievalResult scripts =
        env.config.retrieval_mode == core::RetrievalMode::hierarchy
            ? indices.retrieve(state.user_requirement, rag::Stage::runner, "", params)
            : indices.retrieve_single_index(state.user_requirement, "", params);
    ctx.allrun_reference = scripts.formatted_context;

    auto cmd_prompt = env.prompts->render("command_generation",
                                          {{"commands", command_names(indices)},
                                           {"dir_structure", ctx.dir_structure},
                                           {"case_info", ctx.case_info},
                                           {"allrun_reference", ctx.allrun_reference}});
    auto cmd_result = provider.complete(make_request(cmd_prompt, env, "command_generation"));
    const std::string command_list = llm::strip_code_fences(cmd_result.text);

    // Help texts for the selected commands; command_help retrieval.
    rag::RetrievalResult help =
        env.config.retrieval_mode == core::RetrievalMode::hierarchy
            ? indices.retrieve(command_list.empty() ? state.descriptor.case_solver : command_list,
                               rag::Stage::command_help, "", params)
            : indices.retrieve_single_index(
                  command_list.empty() ? state.descriptor.case_solver : command_list, "", params);

    auto allrun_prompt = env.prompts->render(
        "allrun_generation", {{"commands_help", help.formatted_context},
                              {"allrun_reference", ctx.allrun_reference},
                              {"user_requirement", state.user_requirement},
                              {"dir_structure", ctx.dir_structure},
                              {"case_info", ctx.case_info}});
    auto allrun_result = provider.complete(make_request(allrun_prompt, env, "allrun_generation"));
    std::string script = llm::strip_code_fences(allrun_result.text);
    if (script.empty()) throw ProviderFailure("empty Allrun script generated");
    return ensure_mesh_commands(script, ctx.mesh_commands);
}

}  // namespace

std::string ensure_mesh_commands(const std::string& script,
                                 const std::vector<std::string>& mesh_commands) {
    std::vector<std::string> missing;
    for (const auto& cmd : mesh_commands) {
        // The bare utility name counts as present (runApplication blockMesh).
        const std::string utility = cmd.substr(0, cmd.find(' '));
        if (script.find(cmd) == std::string::npos && script.find(utility) == std::string::npos) {
            missing.push_back(cmd);
        }
    }
    if (missing.empty()) return script;

    std::vector<std::string> lines;
    std::string cur;
    for (char c : script) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    lines.push_back(cur);

    // Insert after the shebang / RunFunctions / cd preamble, before the
    // first action command, so mesh commands precede the solver.
    std::size_t insert_at = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& l = lines[i];
        if (l.empty() || l[0] == '#' || l.rfind(". ", 0) == 0 || l.rfind("cd ", 0) == 0 ||
            l.rfind("source ", 0) == 0 || l.rfind("set ", 0) == 0) {
            insert_at = i + 1;
            continue;
        }
        break;
    }
    lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(insert_at), missing.begin(),
                 missing.end());

    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += "\n";
        out += lines[i];
    }
    return out;
}

core::FoamFile generate_single_file(CaseState& state, const PlannedFile& planned,
                                    const rag::IndexSet& indices, llm::Provider& provider,
                                    const AgentEnv& env, WorkflowContext& ctx) {
    rag::RetrievalParams params;
    params.top_k = env.config.top_k;
    rag::RetrievalResult details =
        env.config.retrieval_mode == core::RetrievalMode::hierarchy
            ? indices.retrieve(state.user_requirement, rag::Stage::input_writer, "", params)
            : indices.retrieve_single_index(state.user_requirement, "", params);

    FoamFile file =
        generate_one(state, planned, indices, provider, env, details, state.foamfiles);
    apply_modifications(state, {file});
    lint_incremental(state, env, ctx);
    return file;
}

std::vector<FoamFile> write_inputs(CaseState& state, const rag::IndexSet& indices,
                                   llm::Provider& provider, const AgentEnv& env,
                                   WorkflowContext& ctx) {
    if (state.plan.files.empty()) throw EmptyPlan("cannot write inputs for an empty plan");

    const auto order = core::generation_order(state.plan, env.config.file_dependency_enabled);

    rag::RetrievalParams params;
    params.top_k = env.config.top_k;
    rag::RetrievalResult details =
        env.config.retrieval_mode == core::RetrievalMode::hierarchy
            ? indices.retrieve(state.user_requirement, rag::Stage::input_writer, "", params)
            : indices.retrieve_single_index(state.user_requirement, "", params);

    std::vector<FoamFile> written;
    for (const auto& planned : order) {
        FoamFile file =
            generate_one(state, planned, indices, provider, env, details, written);
        written.push_back(file);
        apply_modifications(state, {file});
        lint_incremental(state, env, ctx);
    }

    FoamFile allrun{"Allrun", "", allrun_from(state, indices, provider, env, ctx)};
    written.push_back(allrun);
    apply_modifications(state, {allrun});
    return written;
}

// ---------------------------------------------------------------------------
// Reviewer
// ---------------------------------------------------------------------------

namespace {

std::string render_history(const CaseState& state, const AgentEnv& env) {
    // Completed attempts only: the current failure's logs travel in the
    // error_logs slot, not the history block.
    std::ostringstream out;
    bool first = true;
    for (std::size_t i = 0; i + 1 < state.history.size(); ++i) {
        const auto& attempt = state.history[i];
        auto rendered = env.prompts->render(
            "history_entry", {{"attempt_number", std::to_string(attempt.attempt_number)},
                              {"error_logs", attempt.error_logs},
                              {"review_content", attempt.review_analysis}});
        if (!first) out << "\n";
        out << rendered.user_prompt;
        first = false;
    }
    return out.str();
}

}  // namespace

ReviewAnalysis review(const CaseState& state, llm::Provider& provider, const AgentEnv& env,
                      const WorkflowContext& ctx) {
    if (state.run_status != core::RunStatus::failure) {
        throw ValidationError("review precondition: run_status must be failure");
    }
    if (state.execution_logs.empty()) {
        throw ValidationError("review precondition: error logs must be nonempty");
    }

    const std::string foamfiles_str = format_foamfiles(state.foamfiles);
    const bool first_failure = state.history.size() <= 1;

    prompts::RenderedPrompt analysis_prompt;
    if (first_failure) {
        analysis_prompt = env.prompts->render(
            "error_analysis_initial", {{"tutorial_reference", ctx.tutorial_reference},
                                       {"foamfiles", foamfiles_str},
                                       {"error_logs", state.execution_logs},
                                       {"user_requirement", state.user_requirement}});
    } else {
        analysis_prompt = env.prompts->render(
            "error_analysis_subsequent", {{"tutorial_reference", ctx.tutorial_reference},
                                          {"foamfiles", foamfiles_str},
                                          {"error_logs", state.execution_logs},
                                          {"history", render_history(state, env)},
                                          {"user_requirement", state.user_requirement}});
    }
    const std::string template_id =
        first_failure ? "error_analysis_initial" : "error_analysis_subsequent";
    auto analysis = provider.complete(make_request(analysis_prompt, env, template_id));

    auto correction_prompt = env.prompts->render(
        "file_correction", {{"foamfiles", foamfiles_str},
                            {"error_logs", state.execution_logs},
                            {"review_content", analysis.text},
                            {"user_requirement", state.user_requirement}});
    json corrected = llm::complete_structured(
        provider, make_request(correction_prompt, env, "file_correction", "foamfile_list"),
        env.schemas->get("foamfile_list"));

    ReviewAnalysis out;
    out.analysis_text = analysis.text;
    for (const auto& f : corrected.at("foamfile")) {
        FoamFile file{f.at("file_name").get<std::string>(),
                      f.at("folder_name").get<std::string>(),
                      f.at("content").get<std::string>()};
        if (file.folder_name == "." || file.folder_name == "root") file.folder_name.clear();
        for (const auto& existing : state.foamfiles) {
            if (existing.file_name == file.file_name &&
                existing.folder_name == file.folder_name) {
                file.content = guard_pinned_parameters(state.user_requirement,
                                                       existing.content, file.content);
                break;
            }
        }
        out.proposed_modifications.push_back(std::move(file));
    }
    if (out.proposed_modifications.empty()) {
        throw EmptyCorrection("the correction pass returned no files");
    }
    return out;
}

std::string guard_pinned_parameters(const std::string& requirement,
                                    const std::string& original_content,
                                    const std::string& modified_content) {
    dict::DictionaryTree original, modified;
    try {
        original = dict::parse(original_content);
        modified = dict::parse(modified_content);
    } catch (const ParseError&) {
        return modified_content;  // best effort only
    }

    auto value_token = [](const dict::Entry& e) -> const std::string* {
        if (e.kind != dict::Entry::Kind::value) return nullptr;
        if (e.value.empty()) return nullptr;
        const auto& last = e.value.back();
        if (last.kind != dict::Item::Kind::token) return nullptr;
        return &last.token;
    };

    bool changed = false;
    for (const auto& old_entry : original.entries) {
        const std::string* old_value = value_token(old_entry);
        if (!old_value) continue;
        if (!contains_word_ci(requirement, old_entry.keyword)) continue;
        if (!contains_word_ci(requirement, *old_value)) continue;
        for (auto& new_entry : modified.entries) {
            if (new_entry.keyword != old_entry.keyword) continue;
            const std::string* new_value = value_token(new_entry);
            if (new_value && *new_value != *old_value) {
                new_entry.value.back().token = *old_value;  // pinned by the requirement
                changed = true;
            }
        }
    }
    return changed ? dict::serialize(modified) : modified_content;
}

void apply_modifications(CaseState& state, const std::vector<FoamFile>& mods) {
    for (const auto& mod : mods) {
        bool replaced = false;
        for (auto& existing : state.foamfiles) {
            if (existing.file_name == mod.file_name &&
                existing.folder_name == mod.folder_name) {
                existing.content = mod.content;
                replaced = true;
                break;
            }
        }
        if (!replaced) state.foamfiles.push_back(mod);
    }
}

// ---------------------------------------------------------------------------
// HPC script
// ---------------------------------------------------------------------------

std::string generate_hpc_script(CaseState& state, const HpcConfig& hpc, const AgentEnv& env) {
    if (hpc.account.empty()) throw MissingAccount("hpc_config.account is required");

    std::string directives;
    for (std::size_t i = 0; i < hpc.partition_hints.size(); ++i) {
        if (i) directives += "\n";
        const std::string& hint = hpc.partition_hints[i];
        directives += hint.rfind("#SBATCH", 0) == 0 ? hint : "#SBATCH " + hint;
    }

    const int nodes = std::max(1, hpc.nodes);
    auto rendered = env.prompts->render(
        "hpc_slurm_script",
        {{"account", hpc.account},
         {"partition_directives", directives},
         {"nodes", std::to_string(nodes)},
         {"tasks", std::to_string(hpc.tasks)},
         {"tasks_per_node", std::to_string((hpc.tasks + nodes - 1) / nodes)},
         {"walltime", hpc.walltime},
         {"job_name", hpc.job_name.empty() ? "Sim" : hpc.job_name},
         {"case_dir", hpc.case_dir}});

    // The decomposition must match the task count.
    dict::DictionaryTree decompose;
    decompose.header.object = "decomposeParDict";
    decompose.header.location = "\"system\"";
    dict::Entry subdomains;
    subdomains.keyword = "numberOfSubdomains";
    subdomains.value.push_back(dict::Item::make_token(std::to_string(hpc.tasks)));
    dict::Entry method;
    method.keyword = "method";
    method.value.push_back(dict::Item::make_token("scotch"));
    decompose.entries = {subdomains, method};
    apply_modifications(state,
                        {FoamFile{"decomposeParDict", "system", dict::serialize(decompose)}});

    return rendered.user_prompt + "\n";
}

// ---------------------------------------------------------------------------
// Visualization
// ---------------------------------------------------------------------------

std::string infer_visualization_quantity(const std::string& requirement) {
    if (contains_word_ci(requirement, "velocity") || contains_word_ci(requirement, "u")) {
        return "velocity magnitude (U)";
    }
    if (contains_word_ci(requirement, "pressure") || contains_word_ci(requirement, "p")) {
        return "pressure (p)";
    }
    if (contains_word_ci(requirement, "temperature") || contains_word_ci(requirement, "t")) {
        return "temperature (T)";
    }
    return "the requested quantity";
}

std::vector<fs::path> visualize(CaseState& state, llm::Provider& provider,
                                exec::ExecutorContract& executor, const AgentEnv& env,
                                const fs::path& case_dir, const std::string& quantity) {
    if (state.run_status != core::RunStatus::success) {
        throw ValidationError("visualize precondition: run_status must be success");
    }

    const std::string backend =
        env.config.visualization_backend == core::VisualizationBackend::pyvista ? "pyvista"
                                                                                : "paraview";
    const std::string what =
        quantity.empty() ? infer_visualization_quantity(state.user_requirement) : quantity;
    const std::string output_name = "visualization.png";
    const std::string script_name = "plot_case.py";

    const int bound = env.config.visualization_max_retries;
    std::string last_error;
    for (int attempt = 0; attempt < bound; ++attempt) {
        prompts::RenderedPrompt prompt;
        std::string template_id;
        if (attempt == 0) {
            template_id = "visualization_script";
            prompt = env.prompts->render(template_id,
                                         {{"backend", backend},
                                          {"user_requirement", state.user_requirement},
                                          {"quantity", what},
                                          {"output_name", output_name}});
        } else {
            template_id = "visualization_script_retry";
            prompt = env.prompts->render(template_id,
                                         {{"backend", backend},
                                          {"user_requirement", state.user_requirement},
                                          {"quantity", what},
                                          {"output_name", output_name},
                                          {"error_logs", last_error}});
        }
        auto result = provider.complete(make_request(prompt, env, template_id));
        const std::string script = llm::strip_code_fences(result.text);

        fs::create_directories(case_dir);
        core::write_text_file(case_dir / script_name, script);

        exec::ExecutionResult run =
            executor.run_command(case_dir, "python3 " + script_name);
        if (run.status == exec::ExecStatus::success) {
            std::vector<fs::path> images;
            for (const auto& entry : fs::directory_iterator(case_dir)) {
                if (entry.is_regular_file() && entry.path().extension() == ".png") {
                    images.push_back(entry.path());
                }
            }
            std::sort(images.begin(), images.end());
            return images;
        }
        last_error = exec::render_logs(run.logs);
        if (last_error.empty()) last_error = "script exited nonzero";
    }
    throw VisualizationExhausted(bound);
}

}  // namespace foamforge::agents
