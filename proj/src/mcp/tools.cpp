#include "foamforge/mcp/service.hpp"

using nlohmann::json;

namespace foamforge::mcp {

namespace {

json str_prop() { return json{{"type", "string"}}; }

json obj_schema(std::vector<std::pair<std::string, json>> props,
                std::vector<std::string> required, bool open = false) {
    json properties = json::object();
    for (auto& [name, schema] : props) properties[name] = schema;
    json out{{"type", "object"}, {"properties", properties}};
    if (!required.empty()) out["required"] = required;
    if (!open) out["additionalProperties"] = false;
    return out;
}

}  // namespace

std::vector<ToolDescriptor> register_tools() {
    std::vector<ToolDescriptor> tools;

    tools.push_back({
        "create_case",
        obj_schema({{"user_prompt", str_prop()}}, {"user_prompt"}),
        obj_schema({{"case_id", str_prop()}}, {"case_id"}),
        "Initializes a new CFD simulation case and its workspace.",
    });

    tools.push_back({
        "plan_simulation_structure",
        obj_schema({{"case_id", str_prop()}}, {"case_id"}),
        obj_schema({{"plan",
                     json{{"type", "array"},
                          {"items", obj_schema({{"file", str_prop()}, {"folder", str_prop()}},
                                               {"file", "folder"})}}}},
                   {"plan"}),
        "Plans the required file and directory structure based on the user prompt.",
    });

    tools.push_back({
        "generate_file_content",
        obj_schema({{"case_id", str_prop()}, {"file", str_prop()}, {"folder", str_prop()}},
                   {"case_id", "file", "folder"}),
        obj_schema({{"content", str_prop()}}, {"content"}),
        "Generates the content for a single specified configuration file.",
    });

    tools.push_back({
        "generate_mesh",
        obj_schema({{"case_id", str_prop()},
                    {"mesh_config",
                     obj_schema({{"mode", str_prop()},
                                 {"source_path", str_prop()},
                                 {"boundary_names",
                                  json{{"type", "array"}, {"items", str_prop()}}}},
                                {}, true)}},
                   {"case_id", "mesh_config"}),
        obj_schema({{"job_id", str_prop()}}, {"job_id"}),
        "Asynchronously generates the computational mesh using a specified method "
        "(native | external_msh | external_dicts | gmsh_script).",
    });

    tools.push_back({
        "generate_hpc_script",
        obj_schema({{"case_id", str_prop()},
                    {"hpc_config",
                     obj_schema({{"cluster_name", str_prop()},
                                 {"account", str_prop()},
                                 {"nodes", json{{"type", "integer"}}},
                                 {"tasks", json{{"type", "integer"}}},
                                 {"walltime", str_prop()},
                                 {"partition_hints",
                                  json{{"type", "array"}, {"items", str_prop()}}}},
                                {"account"}, true)}},
                   {"case_id", "hpc_config"}),
        obj_schema({{"script_content", str_prop()}}, {"script_content"}),
        "Generates a job submission script (e.g., Slurm) for a high-performance computing "
        "cluster.",
    });

    tools.push_back({
        "run_simulation",
        obj_schema({{"case_id", str_prop()}, {"environment", str_prop()}},
                   {"case_id", "environment"}),
        obj_schema({{"job_id", str_prop()}}, {"job_id"}),
        "Asynchronously executes the simulation either locally or by submitting to an HPC "
        "cluster.",
    });

    tools.push_back({
        "check_job_status",
        obj_schema({{"job_id", str_prop()}}, {"job_id"}),
        obj_schema({{"status",
                     obj_schema({{"state", str_prop()},
                                 {"kind", str_prop()},
                                 {"case_id", str_prop()}},
                                {"state", "kind", "case_id"}, true)}},
                   {"status"}),
        "Checks the status of any asynchronous job (meshing, simulation, visualization).",
    });

    tools.push_back({
        "get_simulation_logs",
        obj_schema({{"case_id", str_prop()}, {"job_id", str_prop()}}, {"case_id", "job_id"}),
        obj_schema({{"logs", json{{"type", "object"}}}}, {"logs"}),
        "Retrieves detailed logs for a failed job to enable error diagnosis.",
    });

    tools.push_back({
        "review_and_suggest_fix",
        obj_schema({{"case_id", str_prop()}, {"logs", str_prop()}}, {"case_id", "logs"}),
        obj_schema(
            {{"suggestions",
              obj_schema({{"analysis", str_prop()},
                          {"modifications",
                           json{{"type", "array"},
                                {"items", obj_schema({{"file", str_prop()},
                                                      {"folder", str_prop()},
                                                      {"content", str_prop()}},
                                                     {"file", "folder", "content"})}}}},
                         {"analysis", "modifications"})}},
            {"suggestions"}),
        "Analyzes error logs and proposes corrective actions.",
    });

    tools.push_back({
        "apply_fix",
        obj_schema({{"case_id", str_prop()},
                    {"modifications",
                     json{{"type", "array"},
                          {"items", obj_schema({{"file", str_prop()},
                                                {"folder", str_prop()},
                                                {"content", str_prop()}},
                                               {"file", "folder", "content"})}}}},
                   {"case_id", "modifications"}),
        obj_schema({{"status", str_prop()}}, {"status"}),
        "Applies suggested modifications to the relevant case files.",
    });

    tools.push_back({
        "generate_visualization",
        obj_schema({{"case_id", str_prop()},
                    {"quantity", str_prop()},
                    {"plane", str_prop()},
                    {"time", json::object()},  // "latest" or a number
                    {"output_name", str_prop()}},
                   {"case_id", "quantity"}),
        obj_schema({{"job_id", str_prop()}}, {"job_id"}),
        "Asynchronously generates a visualization of the simulation results.",
    });

    return tools;
}

std::string job_kind_name(JobKind k) {
    switch (k) {
        case JobKind::mesh: return "mesh";
        case JobKind::simulation: return "simulation";
        case JobKind::visualization: return "visualization";
    }
    return "simulation";
}

}  // namespace foamforge::mcp
