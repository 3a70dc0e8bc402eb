#include "riker/corpus.hpp"

#include <filesystem>
#include <fstream>

namespace riker {

namespace fs = std::filesystem;

int estimate_tokens(const std::string& text) {
  return static_cast<int>((text.size() + 3) / 4);
}

std::map<std::string, std::string> default_canonical_forms() {
  return {{"money", "$#,##0.00 (e.g., $1,250.00)"},
          {"date_documents", "Month D, YYYY (e.g., July 1, 2024)"},
          {"date_keys", "ISO-8601 (e.g., 2024-07-01)"},
          {"count", "plain digits"}};
}

nlohmann::json CorpusManifest::to_json() const {
  nlohmann::json j;
  j["corpus_id"] = corpus_id;
  j["master_seed"] = master_seed;
  j["config_digest"] = config_digest;
  j["tier_tokens"] = tier_tokens;
  j["headroom"] = headroom;
  j["canonical_forms"] = canonical_forms;
  j["totals"] = {{"per_type", per_type_counts}, {"tokens", token_total}};
  nlohmann::json idx = nlohmann::json::array();
  for (const auto& e : index)
    idx.push_back({{"doc_id", e.doc_id},
                   {"doc_type", doc_type_name(e.doc_type)},
                   {"path", e.path},
                   {"token_estimate", e.token_estimate}});
  j["documents"] = std::move(idx);
  return j;
}

CorpusManifest CorpusManifest::from_json(const nlohmann::json& j) {
  CorpusManifest m;
  m.corpus_id = j.at("corpus_id");
  m.master_seed = j.at("master_seed");
  m.config_digest = j.at("config_digest");
  m.tier_tokens = j.at("tier_tokens");
  m.headroom = j.at("headroom");
  m.canonical_forms =
      j.at("canonical_forms").get<std::map<std::string, std::string>>();
  m.per_type_counts =
      j.at("totals").at("per_type").get<std::map<std::string, int>>();
  m.token_total = j.at("totals").at("tokens");
  for (const auto& e : j.at("documents"))
    m.index.push_back({e.at("doc_id"), doc_type_from_name(e.at("doc_type")),
                       e.at("path"), e.at("token_estimate")});
  m.check_totals();
  return m;
}

void CorpusManifest::check_totals() const {
  std::map<std::string, int> counts;
  long long tokens = 0;
  for (const auto& e : index) {
    ++counts[doc_type_name(e.doc_type)];
    tokens += e.token_estimate;
  }
  for (const char* t : {"lease", "field_report", "hr_evaluation"})
    counts.try_emplace(t, 0);
  if (counts != per_type_counts || tokens != token_total)
    throw UsageError("manifest totals do not match index recomputation");
}

CorpusManifest assemble(const std::vector<RenderedDocument>& documents,
                        const std::string& corpus_id,
                        std::uint64_t master_seed,
                        const std::string& config_digest, int tier_tokens,
                        double headroom) {
  CorpusManifest m;
  m.corpus_id = corpus_id;
  m.master_seed = master_seed;
  m.config_digest = config_digest;
  m.tier_tokens = tier_tokens;
  m.headroom = headroom;
  m.canonical_forms = default_canonical_forms();
  for (const char* t : {"lease", "field_report", "hr_evaluation"})
    m.per_type_counts[t] = 0;
  for (const auto& d : documents) {
    m.index.push_back(
        {d.doc_id, d.doc_type, d.relative_path(), d.token_estimate});
    ++m.per_type_counts[doc_type_name(d.doc_type)];
    m.token_total += d.token_estimate;
  }
  long long budget =
      static_cast<long long>(static_cast<double>(tier_tokens) * headroom);
  if (m.token_total > budget)
    throw SizingError(
        "corpus over budget: " + std::to_string(m.token_total) +
        " estimated tokens > " + std::to_string(budget) + " (tier " +
        std::to_string(tier_tokens) + " x headroom " +
        std::to_string(headroom) +
        "); reduce per-type document counts in the config");
  return m;
}

void write_manifest(const CorpusManifest& manifest, const std::string& path) {
  manifest.check_totals();
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw UsageError("cannot write manifest: " + tmp);
    out << manifest.to_json().dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

CorpusManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("missing manifest file: " + path);
  return CorpusManifest::from_json(nlohmann::json::parse(in));
}

void write_documents(const std::vector<RenderedDocument>& documents,
                     const std::string& corpus_dir) {
  for (const auto& d : documents) {
    fs::path p = fs::path(corpus_dir) / d.relative_path();
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw UsageError("cannot write document: " + p.string());
    out << d.body;
  }
}

std::string read_document(const std::string& corpus_dir,
                          const ManifestEntry& entry) {
  std::ifstream in(fs::path(corpus_dir) / entry.path, std::ios::binary);
  if (!in) throw UsageError("missing document file: " + entry.path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace riker
