#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "foamforge/core/state_io.hpp"
#include "foamforge/core/types.hpp"
#include "foamforge/core/vocab.hpp"
#include "foamforge/engine/bench.hpp"
#include "foamforge/llm/schema.hpp"
#include "foamforge/prompts/library.hpp"
#include "foamforge/rag/index.hpp"

namespace fftest {

namespace fs = std::filesystem;

inline fs::path fixtures_dir() { return fs::path(FOAMFORGE_TEST_FIXTURES); }
inline fs::path data_dir() { return fs::path(FOAMFORGE_TEST_DATA); }

/// Unique scratch directory removed on destruction.
struct TempDir {
    fs::path path;

    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("foamforge_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline std::string read_fixture(const std::string& relative) {
    return foamforge::core::read_text_file(fixtures_dir() / relative);
}

/// Shared read-only environment pieces loaded once per process.
struct TestEnv {
    foamforge::prompts::PromptLibrary prompts;
    foamforge::llm::SchemaRegistry schemas;
    foamforge::core::VocabularySets vocab;

    static const TestEnv& get() {
        static TestEnv env{
            foamforge::prompts::PromptLibrary::load(data_dir() / "prompts"),
            foamforge::llm::SchemaRegistry::with_builtins(),
            foamforge::core::VocabularySets::load(data_dir() / "vocab.json"),
        };
        return env;
    }
};

inline foamforge::agents::AgentEnv agent_env(foamforge::core::Config config = {}) {
    foamforge::agents::AgentEnv env;
    env.prompts = &TestEnv::get().prompts;
    env.schemas = &TestEnv::get().schemas;
    env.vocab = &TestEnv::get().vocab;
    env.config = config;
    return env;
}

/// Index set over a deterministic synthetic corpus written under dir.
inline foamforge::rag::IndexSet build_test_index(const fs::path& dir, int cases = 6,
                                                 int dim = 64) {
    foamforge::engine::write_synthetic_corpus(dir, cases);
    auto embedder = std::make_shared<foamforge::llm::HashEmbedder>(dim);
    auto records = foamforge::rag::ingest_corpus(dir);
    auto commands =
        foamforge::rag::load_command_docs(data_dir() / "commands_help.txt");
    return foamforge::rag::IndexSet::build(records, commands, embedder);
}

}  // namespace fftest
