#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "riker/doc_templates.hpp"
#include "riker/tokens.hpp"

namespace riker {

struct SizingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ManifestEntry {
  std::string doc_id;
  DocType doc_type = DocType::lease;
  std::string path;  // relative to corpus root
  int token_estimate = 0;
};

struct CorpusManifest {
  std::string corpus_id;
  std::uint64_t master_seed = 0;
  std::string config_digest;
  int tier_tokens = 0;
  double headroom = 0.85;
  std::vector<ManifestEntry> index;
  std::map<std::string, std::string> canonical_forms;
  std::map<std::string, int> per_type_counts;
  long long token_total = 0;

  nlohmann::json to_json() const;
  static CorpusManifest from_json(const nlohmann::json& j);

  // Recomputes totals from the index and compares; throws on mismatch.
  void check_totals() const;
};

// Canonical surface forms every corpus declares; scoring normalizes to these.
std::map<std::string, std::string> default_canonical_forms();

// Builds the manifest over an already-rendered document set. Documents are
// never dropped: if the estimates exceed tier * headroom this throws a
// SizingError naming the overage.
CorpusManifest assemble(const std::vector<RenderedDocument>& documents,
                        const std::string& corpus_id,
                        std::uint64_t master_seed,
                        const std::string& config_digest, int tier_tokens,
                        double headroom);

// Key-sorted canonical JSON, written atomically (temp file then rename).
void write_manifest(const CorpusManifest& manifest, const std::string& path);
CorpusManifest load_manifest(const std::string& path);

void write_documents(const std::vector<RenderedDocument>& documents,
                     const std::string& corpus_dir);

// Reads a document body back by manifest entry.
std::string read_document(const std::string& corpus_dir,
                          const ManifestEntry& entry);

}  // namespace riker
