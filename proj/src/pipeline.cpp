#include "riker/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "riker/doc_templates.hpp"
#include "riker/sqlite_store.hpp"

namespace riker {

std::vector<std::string> reserve_entity_names(const GroundTruthStore& store) {
  std::vector<std::string> names;
  for (const auto& pool : store.pools)
    for (std::size_t i = pool.used_count; i < pool.members.size(); ++i)
      names.push_back(pool.members[i].display_name);
  return names;
}

GenerateResult generate_universe(const PipelineConfig& config,
                                 std::uint64_t master_seed,
                                 const std::string& data_dir) {
  config.validate();
  SeedTree tree(master_seed);
  Lexicons lex = Lexicons::load(data_dir);

  auto pool_stream = tree.derive_stream({"universe", "pools"});
  auto record_stream = tree.derive_stream({"universe", "records"});
  auto doc_stream = tree.derive_stream({"documents"});

  GenerateResult result;
  auto pools = build_universe_pools(config.universe, lex, pool_stream);
  result.store =
      populate_ground_truth(std::move(pools), config.universe, record_stream);

  CoherenceReport coherence = verify_coherence(result.store);
  if (!coherence.ok()) {
    std::string msg = "generated store failed coherence checks:";
    for (const auto& v : coherence.violations)
      msg += "\n  " + v.kind + ": " + v.detail;
    throw GenerationError(msg);
  }

  TemplateRegistry templates = TemplateRegistry::load(data_dir);
  result.documents = templates.render_corpus(result.store, doc_stream);

  for (const auto& name : reserve_entity_names(result.store)) {
    for (const auto& doc : result.documents) {
      if (doc.body.find(name) != std::string::npos ||
          doc.title.find(name) != std::string::npos)
        throw GenerationError("reserve entity name leaked into document " +
                              doc.doc_id + ": " + name);
    }
  }

  result.manifest =
      assemble(result.documents, config.corpus_id, master_seed,
               config.digest(), config.tier_tokens, config.headroom);
  return result;
}

void write_generate_artifacts(const GenerateResult& result,
                              const ArtifactPaths& paths) {
  std::filesystem::create_directories(paths.root);
  write_documents(result.documents, paths.corpus_dir());
  save_store(result.store, paths.store_path());
  write_manifest(result.manifest, paths.manifest_path());
}

std::vector<Question> run_question_stage(const PipelineConfig& config,
                                         const ArtifactPaths& paths) {
  CorpusManifest manifest = load_manifest(paths.manifest_path());
  if (manifest.config_digest != config.digest())
    throw ConfigError(
        "config does not match the generated corpus (digest mismatch); "
        "regenerate or pass the original config");

  GroundTruthStore store = load_store(paths.store_path());
  SeedTree tree(manifest.master_seed);
  auto stream = tree.derive_stream({"questions"});
  std::vector<Question> questions =
      generate_question_set(store, config.questions, stream);
  emit_question_set(questions, paths.questions_path(), paths.answers_path());
  // Probe consumption changed the pools; persist so verify sees the truth.
  save_store(store, paths.store_path());
  return questions;
}

std::vector<std::string> verify_artifacts(const ArtifactPaths& paths) {
  std::vector<std::string> problems;

  CorpusManifest manifest;
  try {
    manifest = load_manifest(paths.manifest_path());
    manifest.check_totals();
  } catch (const std::exception& e) {
    problems.push_back(std::string("manifest: ") + e.what());
    return problems;
  }

  std::vector<std::string> bodies;
  for (const auto& entry : manifest.index) {
    try {
      std::string body = read_document(paths.corpus_dir(), entry);
      if (static_cast<int>(estimate_tokens(body)) != entry.token_estimate)
        problems.push_back("manifest: token estimate mismatch for " +
                           entry.doc_id);
      bodies.push_back(std::move(body));
    } catch (const std::exception& e) {
      problems.push_back(std::string("corpus: ") + e.what());
    }
  }

  GroundTruthStore store;
  try {
    store = load_store(paths.store_path());
  } catch (const std::exception& e) {
    problems.push_back(std::string("store: ") + e.what());
    return problems;
  }

  CoherenceReport coherence = verify_coherence(store);
  for (const auto& v : coherence.violations)
    problems.push_back("coherence: " + v.kind + ": " + v.detail);

  for (const auto& name : reserve_entity_names(store)) {
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      if (bodies[i].find(name) != std::string::npos)
        problems.push_back("probe leak: reserve entity \"" + name +
                           "\" appears in " + manifest.index[i].doc_id);
    }
  }

  // Answer keys must be reproducible from the relational store alone.
  std::ifstream answers(paths.answers_path());
  if (answers) {
    std::set<std::string> seen_ids;
    std::string line;
    while (std::getline(answers, line)) {
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        problems.push_back(std::string("answers: parse error: ") + e.what());
        continue;
      }
      std::string qid = j.value("question_id", "");
      if (!seen_ids.insert(qid).second)
        problems.push_back("answers: duplicate question id " + qid);
      if (!j.contains("query") || j["query"].is_null()) continue;
      try {
        AnswerQuery query = AnswerQuery::from_json(j["query"]);
        AnswerValue expected = AnswerValue::from_json(j.at("answer_key"));
        AnswerValue recomputed = evaluate_query(store, query);
        if (!(expected == recomputed))
          problems.push_back("answers: key for " + qid +
                             " does not match the store (" +
                             expected.canonical_reply() + " vs " +
                             recomputed.canonical_reply() + ")");
      } catch (const std::exception& e) {
        problems.push_back("answers: " + qid + ": " + e.what());
      }
    }
  }

  return problems;
}

}  // namespace riker
