#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riker/corpus.hpp"
#include "riker/ground_truth.hpp"
#include "riker/pipeline_config.hpp"
#include "riker/questions.hpp"

namespace riker {

// Conventional layout under an output directory:
//   corpus/<doc_type>/<doc_id>.txt
//   ground_truth.sqlite3
//   manifest.json
//   questions.jsonl / answers.jsonl
//   results/<model>/run.jsonl
//   scored/<model>.jsonl
//   reports/
struct ArtifactPaths {
  std::string root;
  std::string corpus_dir() const { return root + "/corpus"; }
  std::string store_path() const { return root + "/ground_truth.sqlite3"; }
  std::string manifest_path() const { return root + "/manifest.json"; }
  std::string questions_path() const { return root + "/questions.jsonl"; }
  std::string answers_path() const { return root + "/answers.jsonl"; }
  std::string results_dir(const std::string& model) const {
    return root + "/results/" + model;
  }
  std::string scored_path(const std::string& model) const {
    return root + "/scored/" + model + ".jsonl";
  }
  std::string reports_dir() const { return root + "/reports"; }
};

struct GenerateResult {
  GroundTruthStore store;
  std::vector<RenderedDocument> documents;
  CorpusManifest manifest;
};

// Ground truth first: pools, relational records, coherence gate, rendered
// documents, probe-absence check, then the manifest. Pure function of
// (config, master_seed, data files).
GenerateResult generate_universe(const PipelineConfig& config,
                                 std::uint64_t master_seed,
                                 const std::string& data_dir);

// Writes corpus files, the SQLite store, and the manifest.
void write_generate_artifacts(const GenerateResult& result,
                              const ArtifactPaths& paths);

// Loads the store, derives the question stream from the manifest seed,
// emits questions.jsonl / answers.jsonl, and re-saves the store (probe
// consumption is part of ground truth).
std::vector<Question> run_question_stage(const PipelineConfig& config,
                                         const ArtifactPaths& paths);

// Re-checks every invariant over artifacts on disk: manifest totals and file
// integrity, store coherence, probe absence from the rendered corpus, and
// answer keys recomputed from the relational store. Returns problems found.
std::vector<std::string> verify_artifacts(const ArtifactPaths& paths);

// Names of reserve entities that must never appear in any rendered body.
std::vector<std::string> reserve_entity_names(const GroundTruthStore& store);

}  // namespace riker
