#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "foamforge/core/types.hpp"
#include "foamforge/llm/provider.hpp"

namespace foamforge::rag {

/// One ingested tutorial case: the four knowledge dimensions extracted
/// from its directory.
struct CaseRecord {
    core::CaseDescriptor metadata;
    std::string case_path;  // relative to the corpus root; unique
    std::string directory_structure;
    std::map<std::string, std::string> file_contents;  // "system/controlDict" -> text
    std::string execution_script;                       // Allrun content, "" when absent
};

/// Scans a corpus root for case directories (identified by a system/
/// subdirectory) and extracts one record per case, in sorted path order.
/// Throws EmptyCorpus when none are found.
std::vector<CaseRecord> ingest_corpus(const std::filesystem::path& root);

/// CFD-domain text normalization applied before embedding: lowercasing,
/// camelCase splitting of solver/utility names, and unit-token cleanup
/// (m2/s -> m^2/s).
std::string normalize_for_embedding(const std::string& text);

enum class IndexKind {
    tutorial_structure,
    tutorial_details,
    execution_scripts,
    command_documentation,
};

std::string index_kind_name(IndexKind k);

enum class Stage { architect, input_writer, runner, command_help };

Stage stage_from_name(const std::string& name);

/// The fixed, total stage -> index mapping. In hierarchy mode no query
/// ever crosses indices.
IndexKind index_for_stage(Stage stage);

struct Payload {
    std::string case_name;    // owning case (or command name)
    std::string source_path;  // file path within the case, if any
    std::string text;         // original (unnormalized) indexed text
};

struct IndexEntry {
    std::vector<float> vector;
    double norm_sq = 0.0;
    Payload payload;
};

class VectorIndex {
public:
    VectorIndex() = default;
    VectorIndex(IndexKind kind, int dim) : kind_(kind), dim_(dim) {}

    IndexKind kind() const { return kind_; }
    int dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<IndexEntry>& entries() const { return entries_; }

    /// Throws DimensionMismatch when the vector length differs from dim.
    void add(std::vector<float> vector, Payload payload);

private:
    IndexKind kind_ = IndexKind::tutorial_structure;
    int dim_ = 0;
    std::vector<IndexEntry> entries_;
};

struct CommandDoc {
    std::string name;
    std::string help;
};

/// Loads the bundled utility-documentation corpus ("name: help" lines).
std::vector<CommandDoc> load_command_docs(const std::filesystem::path& file);

struct RetrievalMatch {
    double score = 0.0;  // cosine similarity in [-1, 1]
    Payload payload;
};

struct RetrievalResult {
    std::vector<RetrievalMatch> matches;
    std::string formatted_context;
};

struct RetrievalParams {
    int top_k = 5;
    double min_score = 0.2;   // relevance filter threshold
    bool dedup_cases = true;  // drop repeated payloads of the same case
};

/// The four specialized indices plus the corpus records they were built
/// from. Retrieval is an exact brute-force cosine scan: the ranking
/// always equals a full linear scan. Read-only after build; safe for
/// concurrent retrieval.
class IndexSet {
public:
    IndexSet() = default;

    static IndexSet build(const std::vector<CaseRecord>& records,
                          const std::vector<CommandDoc>& command_docs,
                          std::shared_ptr<llm::Embedder> embedder);

    bool built() const { return built_; }
    const VectorIndex& index(IndexKind kind) const;
    std::size_t merged_size() const;
    int dim() const { return dim_; }

    const std::vector<CaseRecord>& records() const { return records_; }
    const CaseRecord* record_for(const std::string& case_name) const;

    /// Algorithm: embed the query, select the stage's index, take the
    /// top_k by cosine, filter by relevance, format per stage.
    RetrievalResult retrieve(const std::string& query, Stage stage, const std::string& context,
                             const RetrievalParams& params = {}) const;

    /// Ablation baseline: identical contract over one merged index of
    /// all payloads.
    RetrievalResult retrieve_single_index(const std::string& query, const std::string& context,
                                          const RetrievalParams& params = {}) const;

    /// Persists as manifest.json + per-index vector blobs + payload and
    /// record stores. Byte-identical for identical inputs.
    void save(const std::filesystem::path& dir) const;
    static IndexSet load(const std::filesystem::path& dir,
                         std::shared_ptr<llm::Embedder> embedder);

private:
    RetrievalResult search(const std::vector<const VectorIndex*>& indices, IndexKind format_kind,
                           const std::string& query, const RetrievalParams& params) const;

    bool built_ = false;
    int dim_ = 0;
    std::vector<VectorIndex> indices_;  // ordered by IndexKind
    std::vector<CaseRecord> records_;
    std::vector<CommandDoc> command_docs_;
    std::shared_ptr<llm::Embedder> embedder_;
};

}  // namespace foamforge::rag
