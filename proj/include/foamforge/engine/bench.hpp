#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "foamforge/core/types.hpp"

namespace foamforge::engine {

/// One scripted bench scenario: a requirement, how many runs fail before
/// success (scripted into the fake executor), and optional per-template
/// response overrides for the pattern provider.
struct BenchCase {
    std::string name;
    std::string requirement;
    int fail_times = 0;
    std::map<std::string, std::vector<std::string>> responses;
};

struct BenchSuite {
    std::vector<BenchCase> cases;
    std::filesystem::path corpus_root;  // empty -> synthesize a corpus
};

BenchSuite load_bench_suite(const std::filesystem::path& file);

/// The canned per-template responses describing an icoFoam cavity flow;
/// suite cases inherit these unless they override a template.
std::map<std::string, std::vector<std::string>> default_scripted_responses();

/// Writes a deterministic corpus of synthetic tutorial cases (varying
/// solver, folders, boundary names) for offline index builds.
void write_synthetic_corpus(const std::filesystem::path& dir, int case_count);

struct BenchOptions {
    core::Config base;
    bool vary_reviewer = true;
    bool vary_file_dependency = true;
    bool vary_retrieval = false;
    int jobs = 1;
    std::filesystem::path workdir;
    std::filesystem::path data_dir;  // prompts/vocab/commands location
};

/// Runs the suite across the toggle matrix and returns the summary CSV
/// (success rate, average token usage, average reviewer loops per row).
/// Deterministic: two runs over the same inputs yield identical bytes.
std::string run_bench(const BenchSuite& suite, const BenchOptions& options);

}  // namespace foamforge::engine
