#include "foamforge/rag/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "foamforge/core/error.hpp"
#include "foamforge/core/state_io.hpp"
#include "foamforge/simd/kernels.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace foamforge::rag {

std::string index_kind_name(IndexKind k) {
    switch (k) {
        case IndexKind::tutorial_structure: return "tutorial_structure";
        case IndexKind::tutorial_details: return "tutorial_details";
        case IndexKind::execution_scripts: return "execution_scripts";
        case IndexKind::command_documentation: return "command_documentation";
    }
    return "unknown";
}

Stage stage_from_name(const std::string& name) {
    if (name == "architect") return Stage::architect;
    if (name == "input_writer") return Stage::input_writer;
    if (name == "runner") return Stage::runner;
    if (name == "command_help") return Stage::command_help;
    throw ConfigError("unknown retrieval stage: " + name);
}

IndexKind index_for_stage(Stage stage) {
    switch (stage) {
        case Stage::architect: return IndexKind::tutorial_structure;
        case Stage::input_writer: return IndexKind::tutorial_details;
        case Stage::runner: return IndexKind::execution_scripts;
        case Stage::command_help: return IndexKind::command_documentation;
    }
    throw ConfigError("unknown retrieval stage");
}

void VectorIndex::add(std::vector<float> vector, Payload payload) {
    if (static_cast<int>(vector.size()) != dim_) {
        throw DimensionMismatch("embedder returned " + std::to_string(vector.size()) +
                                "-dim vector for " + index_kind_name(kind_) + ", expected " +
                                std::to_string(dim_));
    }
    IndexEntry entry;
    entry.norm_sq = simd::squared_norm(vector);
    entry.vector = std::move(vector);
    entry.payload = std::move(payload);
    entries_.push_back(std::move(entry));
}

namespace {

std::string structure_text(const CaseRecord& rec) {
    std::ostringstream out;
    out << "case name: " << rec.metadata.case_name
        << "\ncase domain: " << rec.metadata.case_domain
        << "\ncase category: " << rec.metadata.case_category
        << "\ncase solver: " << rec.metadata.case_solver << "\n"
        << rec.directory_structure;
    return out.str();
}

}  // namespace

IndexSet IndexSet::build(const std::vector<CaseRecord>& records,
                         const std::vector<CommandDoc>& command_docs,
                         std::shared_ptr<llm::Embedder> embedder) {
    IndexSet set;
    set.dim_ = embedder->dim();
    set.records_ = records;
    set.command_docs_ = command_docs;
    set.embedder_ = std::move(embedder);
    set.indices_ = {
        VectorIndex(IndexKind::tutorial_structure, set.dim_),
        VectorIndex(IndexKind::tutorial_details, set.dim_),
        VectorIndex(IndexKind::execution_scripts, set.dim_),
        VectorIndex(IndexKind::command_documentation, set.dim_),
    };

    auto embed = [&](const std::string& text) {
        return set.embedder_->embed(normalize_for_embedding(text));
    };

    for (const auto& rec : set.records_) {
        set.indices_[0].add(embed(structure_text(rec)),
                            Payload{rec.metadata.case_name, rec.case_path, structure_text(rec)});
        for (const auto& [path, content] : rec.file_contents) {
            set.indices_[1].add(
                embed("file " + path + " of case " + rec.metadata.case_name + "\n" + content),
                Payload{rec.metadata.case_name, path, content});
        }
        set.indices_[2].add(embed(rec.execution_script),
                            Payload{rec.metadata.case_name, "Allrun", rec.execution_script});
    }
    for (const auto& doc : set.command_docs_) {
        set.indices_[3].add(embed(doc.name + ": " + doc.help),
                            Payload{doc.name, doc.name, doc.help});
    }

    set.built_ = true;
    return set;
}

const VectorIndex& IndexSet::index(IndexKind kind) const {
    if (!built_) throw IndexNotBuilt("index set has not been built");
    return indices_[static_cast<std::size_t>(kind)];
}

std::size_t IndexSet::merged_size() const {
    std::size_t total = 0;
    for (const auto& idx : indices_) total += idx.size();
    return total;
}

const CaseRecord* IndexSet::record_for(const std::string& case_name) const {
    for (const auto& rec : records_) {
        if (rec.metadata.case_name == case_name) return &rec;
    }
    return nullptr;
}

namespace {

std::string format_match(IndexKind kind, const RetrievalMatch& m) {
    switch (kind) {
        case IndexKind::tutorial_structure:
            return "Similar case: " + m.payload.case_name + "\n" + m.payload.text;
        case IndexKind::tutorial_details:
            return "File " + m.payload.source_path + " from case " + m.payload.case_name +
                   ":\n" + m.payload.text;
        case IndexKind::execution_scripts:
            return "Allrun from case " + m.payload.case_name + ":\n" + m.payload.text;
        case IndexKind::command_documentation:
            return m.payload.case_name + ": " + m.payload.text;
    }
    return m.payload.text;
}

}  // namespace

RetrievalResult IndexSet::search(const std::vector<const VectorIndex*>& indices,
                                 IndexKind format_kind, const std::string& query,
                                 const RetrievalParams& params) const {
    if (!built_) throw IndexNotBuilt("index set has not been built");

    const std::vector<float> q = embedder_->embed(normalize_for_embedding(query));
    const double q_norm_sq = simd::squared_norm(q);

    struct Scored {
        double score;
        std::size_t order;  // global insertion order, the deterministic tie-break
        const IndexEntry* entry;
    };
    std::vector<Scored> scored;
    std::size_t order = 0;
    for (const VectorIndex* idx : indices) {
        for (const auto& entry : idx->entries()) {
            double score = 0.0;
            if (q_norm_sq > 0.0 && entry.norm_sq > 0.0) {
                score = simd::dot(q, entry.vector) /
                        (std::sqrt(q_norm_sq) * std::sqrt(entry.norm_sq));
            }
            scored.push_back({score, order++, &entry});
        }
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.order < b.order;
    });

    RetrievalResult result;
    const std::size_t k = std::min<std::size_t>(scored.size(),
                                                static_cast<std::size_t>(params.top_k));
    std::set<std::string> seen_cases;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& s = scored[i];
        if (s.score < params.min_score) continue;  // relevance filter
        if (params.dedup_cases && !seen_cases.insert(s.entry->payload.case_name).second) {
            continue;
        }
        result.matches.push_back({s.score, s.entry->payload});
    }

    std::ostringstream ctx;
    for (std::size_t i = 0; i < result.matches.size(); ++i) {
        if (i) ctx << "\n---\n";
        ctx << format_match(format_kind, result.matches[i]);
    }
    result.formatted_context = ctx.str();
    return result;
}

RetrievalResult IndexSet::retrieve(const std::string& query, Stage stage,
                                   const std::string& /*context*/,
                                   const RetrievalParams& params) const {
    const IndexKind kind = index_for_stage(stage);
    return search({&index(kind)}, kind, query, params);
}

RetrievalResult IndexSet::retrieve_single_index(const std::string& query,
                                                const std::string& /*context*/,
                                                const RetrievalParams& params) const {
    std::vector<const VectorIndex*> all;
    for (const auto& idx : indices_) all.push_back(&idx);
    // Formatting falls back to the structure style for the merged view.
    return search(all, IndexKind::tutorial_structure, query, params);
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

json payload_to_json(const Payload& p) {
    return json{{"case_name", p.case_name}, {"source_path", p.source_path}, {"text", p.text}};
}

Payload payload_from_json(const json& j) {
    return Payload{j.at("case_name").get<std::string>(),
                   j.at("source_path").get<std::string>(),
                   j.at("text").get<std::string>()};
}

void write_vectors(const fs::path& path, const VectorIndex& idx) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write index blob: " + path.string());
    for (const auto& entry : idx.entries()) {
        out.write(reinterpret_cast<const char*>(entry.vector.data()),
                  static_cast<std::streamsize>(entry.vector.size() * sizeof(float)));
    }
}

std::vector<std::vector<float>> read_vectors(const fs::path& path, std::size_t count, int dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read index blob: " + path.string());
    std::vector<std::vector<float>> out(count, std::vector<float>(static_cast<std::size_t>(dim)));
    for (auto& v : out) {
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(float)));
        if (!in) throw Error("index blob truncated: " + path.string());
    }
    return out;
}

}  // namespace

void IndexSet::save(const fs::path& dir) const {
    if (!built_) throw IndexNotBuilt("cannot save an unbuilt index set");
    fs::create_directories(dir);

    json manifest{{"embedding_dim", dim_}, {"indices", json::array()}};
    for (const auto& idx : indices_) {
        const std::string name = index_kind_name(idx.kind());
        manifest["indices"].push_back(json{{"kind", name}, {"count", idx.size()}});
        write_vectors(dir / (name + ".vec"), idx);

        json payloads = json::array();
        for (const auto& entry : idx.entries()) payloads.push_back(payload_to_json(entry.payload));
        core::write_text_file(dir / (name + ".payloads.json"), payloads.dump(2) + "\n");
    }
    core::write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

    json records = json::array();
    for (const auto& rec : records_) {
        records.push_back(json{
            {"case_path", rec.case_path},
            {"metadata",
             {{"case_name", rec.metadata.case_name},
              {"case_domain", rec.metadata.case_domain},
              {"case_category", rec.metadata.case_category},
              {"case_solver", rec.metadata.case_solver}}},
            {"directory_structure", rec.directory_structure},
            {"file_contents", rec.file_contents},
            {"execution_script", rec.execution_script},
        });
    }
    core::write_text_file(dir / "records.json", records.dump(2) + "\n");

    json commands = json::array();
    for (const auto& doc : command_docs_) {
        commands.push_back(json{{"name", doc.name}, {"help", doc.help}});
    }
    core::write_text_file(dir / "commands.json", commands.dump(2) + "\n");
}

IndexSet IndexSet::load(const fs::path& dir, std::shared_ptr<llm::Embedder> embedder) {
    const json manifest = json::parse(core::read_text_file(dir / "manifest.json"));

    IndexSet set;
    set.dim_ = manifest.at("embedding_dim").get<int>();
    if (embedder && embedder->dim() != set.dim_) {
        throw DimensionMismatch("persisted index uses dim " + std::to_string(set.dim_) +
                                ", embedder yields " + std::to_string(embedder->dim()));
    }
    set.embedder_ = std::move(embedder);

    for (const auto& meta : manifest.at("indices")) {
        const std::string name = meta.at("kind").get<std::string>();
        const auto count = meta.at("count").get<std::size_t>();
        IndexKind kind = IndexKind::tutorial_structure;
        for (int k = 0; k < 4; ++k) {
            if (index_kind_name(static_cast<IndexKind>(k)) == name)
                kind = static_cast<IndexKind>(k);
        }
        VectorIndex idx(kind, set.dim_);
        auto vectors = read_vectors(dir / (name + ".vec"), count, set.dim_);
        const json payloads = json::parse(core::read_text_file(dir / (name + ".payloads.json")));
        for (std::size_t i = 0; i < count; ++i) {
            idx.add(std::move(vectors[i]), payload_from_json(payloads.at(i)));
        }
        set.indices_.push_back(std::move(idx));
    }

    const json records = json::parse(core::read_text_file(dir / "records.json"));
    for (const auto& r : records) {
        CaseRecord rec;
        rec.case_path = r.at("case_path").get<std::string>();
        const auto& m = r.at("metadata");
        rec.metadata = core::CaseDescriptor{m.at("case_name").get<std::string>(),
                                            m.at("case_domain").get<std::string>(),
                                            m.at("case_category").get<std::string>(),
                                            m.at("case_solver").get<std::string>()};
        rec.directory_structure = r.at("directory_structure").get<std::string>();
        rec.file_contents = r.at("file_contents").get<std::map<std::string, std::string>>();
        rec.execution_script = r.at("execution_script").get<std::string>();
        set.records_.push_back(std::move(rec));
    }

    const json commands = json::parse(core::read_text_file(dir / "commands.json"));
    for (const auto& c : commands) {
        set.command_docs_.push_back(
            CommandDoc{c.at("name").get<std::string>(), c.at("help").get<std::string>()});
    }

    set.built_ = true;
    return set;
}

}  // namespace foamforge::rag
