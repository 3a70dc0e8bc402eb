#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "riker/corpus.hpp"
#include "riker/pipeline.hpp"
#include "test_util.hpp"

using namespace riker;

TEST_CASE("token estimate is ceil(bytes / 4)") {
  CHECK(estimate_tokens("") == 0);
  CHECK(estimate_tokens("a") == 1);
  CHECK(estimate_tokens("abcd") == 1);
  CHECK(estimate_tokens("abcde") == 2);
  CHECK(estimate_tokens(std::string(4096, 'x')) == 1024);
}

namespace {

std::vector<RenderedDocument> fake_docs(int n, int bytes_each) {
  std::vector<RenderedDocument> docs;
  for (int i = 0; i < n; ++i) {
    RenderedDocument d;
    d.doc_id = "doc-" + std::to_string(i);
    d.doc_type = DocType::lease;
    d.title = "T";
    d.body = std::string(bytes_each, 'x');
    d.source_record_id = d.doc_id;
    d.token_estimate = estimate_tokens(d.body);
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace

TEST_CASE("assemble totals add up and per-type counts are right") {
  auto docs = fake_docs(8, 400);
  CorpusManifest m = assemble(docs, "test", 1, "digest", 32768, 0.85);
  CHECK(m.index.size() == 8);
  CHECK(m.token_total == 8 * 100);
  CHECK(m.per_type_counts.at("lease") == 8);
  m.check_totals();
}

TEST_CASE("assemble rejects an over-budget corpus and never drops documents") {
  // 0.85 * 1000 = 850 token budget; 9 docs x 100 tokens exceeds it.
  auto docs = fake_docs(9, 400);
  CHECK_THROWS_AS(assemble(docs, "test", 1, "d", 1000, 0.85), SizingError);
  // Exactly at the boundary is accepted.
  auto fits = fake_docs(8, 400);
  CorpusManifest m = assemble(fits, "test", 1, "d", 1000, 0.85);
  CHECK(m.token_total == 800);
}

TEST_CASE("manifest json round-trips every field") {
  auto docs = fake_docs(3, 123);
  CorpusManifest m = assemble(docs, "rt", 99, "abcd1234", 4096, 0.8);
  CorpusManifest back = CorpusManifest::from_json(m.to_json());
  CHECK(back.corpus_id == m.corpus_id);
  CHECK(back.master_seed == m.master_seed);
  CHECK(back.config_digest == m.config_digest);
  CHECK(back.tier_tokens == m.tier_tokens);
  CHECK(back.headroom == m.headroom);
  CHECK(back.token_total == m.token_total);
  CHECK(back.canonical_forms == m.canonical_forms);
  CHECK(back.per_type_counts == m.per_type_counts);
  REQUIRE(back.index.size() == m.index.size());
  for (std::size_t i = 0; i < m.index.size(); ++i) {
    CHECK(back.index[i].doc_id == m.index[i].doc_id);
    CHECK(back.index[i].path == m.index[i].path);
    CHECK(back.index[i].token_estimate == m.index[i].token_estimate);
  }
}

TEST_CASE("manifest write is atomic and loadable") {
  std::string dir = scratch_dir("corpus-manifest");
  auto docs = fake_docs(2, 100);
  CorpusManifest m = assemble(docs, "wr", 7, "d", 4096, 0.85);
  write_manifest(m, dir + "/manifest.json");
  CHECK_FALSE(std::filesystem::exists(dir + "/manifest.json.tmp"));
  CorpusManifest back = load_manifest(dir + "/manifest.json");
  CHECK(back.to_json() == m.to_json());
}

TEST_CASE("documents write under their type directory and read back") {
  std::string dir = scratch_dir("corpus-docs");
  auto docs = fake_docs(2, 64);
  write_documents(docs, dir);
  CorpusManifest m = assemble(docs, "io", 7, "d", 4096, 0.85);
  for (const auto& entry : m.index)
    CHECK(read_document(dir, entry) == std::string(64, 'x'));
}

TEST_CASE("default 32K config lands inside the fill band") {
  PipelineConfig config =
      PipelineConfig::load(source_dir() + "/configs/32k.json");
  for (std::uint64_t seed : {1, 2, 3}) {
    GenerateResult result = generate_universe(config, seed, data_dir());
    CHECK(result.manifest.token_total >= 0.70 * config.tier_tokens);
    CHECK(result.manifest.token_total <= 0.95 * config.tier_tokens);
    CHECK(result.manifest.token_total <=
          config.headroom * config.tier_tokens);
  }
}

TEST_CASE("corrupted totals are detected") {
  auto docs = fake_docs(2, 100);
  CorpusManifest m = assemble(docs, "bad", 7, "d", 4096, 0.85);
  m.token_total += 1;
  CHECK_THROWS(m.check_totals());
}
