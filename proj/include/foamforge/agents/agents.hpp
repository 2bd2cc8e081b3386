#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "foamforge/core/types.hpp"
#include "foamforge/core/vocab.hpp"
#include "foamforge/exec/executor.hpp"
#include "foamforge/llm/provider.hpp"
#include "foamforge/llm/schema.hpp"
#include "foamforge/prompts/library.hpp"
#include "foamforge/rag/index.hpp"

namespace foamforge::agents {

/// Reviewer output: the diagnosis text and the minimal set of changed
/// files it proposes.
struct ReviewAnalysis {
    std::string analysis_text;
    std::vector<core::FoamFile> proposed_modifications;
};

enum class MeshMode { native, external_msh, external_dicts, gmsh_script };

std::string mesh_mode_name(MeshMode m);

struct MeshSpec {
    MeshMode mode = MeshMode::native;
    std::optional<std::filesystem::path> source_path;
    std::vector<std::string> boundary_names;
};

/// Files and run-script commands a mesh mode contributes to the case.
struct MeshArtifacts {
    std::vector<std::string> commands;       // polyMesh-producing sequence
    std::vector<core::FoamFile> artifacts;   // scripts / provided dicts
};

/// Cross-agent context assembled during a run: retrieved references, the
/// queued mesh commands, and lint findings. Persisted alongside the case
/// state so service calls can resume it.
struct WorkflowContext {
    std::string tutorial_reference;
    std::string dir_structure;
    std::string dir_counts_str;
    std::string case_info;
    std::string allrun_reference;
    std::vector<std::string> mesh_commands;
    std::vector<std::string> boundary_names;
    std::vector<std::string> lint_log;

    std::string to_json() const;
    static WorkflowContext from_json(const std::string& text);
};

/// Shared read-only dependencies for agent operations.
struct AgentEnv {
    const prompts::PromptLibrary* prompts = nullptr;
    const llm::SchemaRegistry* schemas = nullptr;
    const core::VocabularySets* vocab = nullptr;
    core::Config config;
};

/// Requirement classification, reference case retrieval (one architect-
/// stage query, refined against the details of the retrieved cases), and
/// simulation decomposition. Fills state.descriptor and state.plan and
/// populates the retrieval fields of the context.
void architect_plan(core::CaseState& state, const rag::IndexSet& indices,
                    llm::Provider& provider, const AgentEnv& env, WorkflowContext& ctx);

/// Deterministic mesh-mode cascade: a .msh attachment wins, then attached
/// native mesh dicts, then an explicit mesh-tool mention in the
/// requirement, else native meshing. Total over all inputs.
MeshSpec select_mesh_mode(const std::string& requirement,
                          const std::vector<std::filesystem::path>& attachments);

/// Prepares mesh inputs for the selected mode. Native meshing adds
/// blockMeshDict to the plan; external files become case artifacts with a
/// conversion command queued; gmsh mode asks the provider for a mesh
/// generation script. Every mode ends with a polyMesh-producing command
/// sequence queued for the run script.
MeshArtifacts prepare_mesh(core::CaseState& state, const MeshSpec& spec,
                           llm::Provider& provider, const AgentEnv& env, WorkflowContext& ctx);

/// Generates every planned file in generation order, embedding all
/// previously generated files in each request when file dependency is
/// enabled, linting as it goes, and producing the Allrun script last.
/// Appends the generated files to state.foamfiles and returns them.
std::vector<core::FoamFile> write_inputs(core::CaseState& state, const rag::IndexSet& indices,
                                         llm::Provider& provider, const AgentEnv& env,
                                         WorkflowContext& ctx);

/// Generates one planned file using the same template and context rules
/// as write_inputs; service-level entry point.
core::FoamFile generate_single_file(core::CaseState& state, const core::PlannedFile& planned,
                                    const rag::IndexSet& indices, llm::Provider& provider,
                                    const AgentEnv& env, WorkflowContext& ctx);

/// Error analysis (initial or history-aware) followed by a correction
/// pass returning only changed files. Corrections never touch parameter
/// values the user requirement pins, enforced best-effort by
/// guard_pinned_parameters.
ReviewAnalysis review(const core::CaseState& state, llm::Provider& provider,
                      const AgentEnv& env, const WorkflowContext& ctx);

/// Restores any scalar entry whose keyword and original value both appear
/// in the requirement text. Returns the guarded content.
std::string guard_pinned_parameters(const std::string& requirement,
                                    const std::string& original_content,
                                    const std::string& modified_content);

/// Replaces or adds each modification by (folder, file) key; untouched
/// files stay identical. Idempotent for identical mods.
void apply_modifications(core::CaseState& state, const std::vector<core::FoamFile>& mods);

struct HpcConfig {
    std::string cluster_name;
    std::string account;
    int nodes = 1;
    int tasks = 32;
    std::string walltime = "02:00:00";
    std::vector<std::string> partition_hints = {"-C cpu", "-q regular", "--mem=128GB"};
    std::string job_name = "Sim";
    std::string case_dir = ".";
};

/// Renders the Slurm submission script and upserts a decomposeParDict
/// matching the task count into the case files. Throws MissingAccount.
std::string generate_hpc_script(core::CaseState& state, const HpcConfig& hpc,
                                const AgentEnv& env);

/// Generates a plotting script, executes it through the executor, and
/// retries with error feedback up to the configured bound. Returns the
/// image files found in the case directory (empty under a fake executor).
std::vector<std::filesystem::path> visualize(core::CaseState& state, llm::Provider& provider,
                                             exec::ExecutorContract& executor,
                                             const AgentEnv& env,
                                             const std::filesystem::path& case_dir,
                                             const std::string& quantity = "");

/// Best-effort quantity inference from the requirement text.
std::string infer_visualization_quantity(const std::string& requirement);

/// Serializes foam files the way reviewer/writer prompts embed them.
std::string format_foamfiles(const std::vector<core::FoamFile>& files);

/// Inserts any missing mesh commands into the run script ahead of its
/// first action command.
std::string ensure_mesh_commands(const std::string& script,
                                 const std::vector<std::string>& mesh_commands);

}  // namespace foamforge::agents
