#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "riker/questions.hpp"
#include "test_util.hpp"

using namespace riker;

namespace {

GroundTruthStore make_store(std::uint64_t seed) {
  SeedTree tree(seed);
  Lexicons lex = Lexicons::load(data_dir());
  auto pool_stream = tree.derive_stream({"universe", "pools"});
  auto record_stream = tree.derive_stream({"universe", "records"});
  UniverseConfig config;
  auto pools = build_universe_pools(config, lex, pool_stream);
  return populate_ground_truth(std::move(pools), config, record_stream);
}

std::vector<Question> make_questions(GroundTruthStore& store,
                                     std::uint64_t seed) {
  SeedTree tree(seed);
  auto stream = tree.derive_stream({"questions"});
  return generate_question_set(store, QuestionMix{}, stream);
}

}  // namespace

TEST_CASE("category is a pure function of level") {
  for (int level = 1; level <= 4; ++level)
    CHECK(category_for_level(level) == QuestionCategory::single_doc);
  for (int level = 5; level <= 10; ++level)
    CHECK(category_for_level(level) == QuestionCategory::aggregation);
  for (int level = 11; level <= 12; ++level)
    CHECK(category_for_level(level) == QuestionCategory::probe);
  CHECK_THROWS_AS(category_for_level(0), UsageError);
  CHECK_THROWS_AS(category_for_level(13), UsageError);
}

TEST_CASE("level plan covers the total and respects the mix") {
  auto counts = plan_level_counts(QuestionMix{});
  int total = 0, single = 0, agg = 0, probe = 0;
  for (const auto& [level, n] : counts) {
    total += n;
    if (level <= 4) single += n;
    else if (level <= 10) agg += n;
    else probe += n;
  }
  CHECK(total == 110);
  CHECK(single == 55);
  CHECK(agg == 44);
  CHECK(probe == 11);
}

TEST_CASE("110-question set matches the declared mix within 5 points") {
  GroundTruthStore store = make_store(1);
  auto questions = make_questions(store, 1);
  REQUIRE(questions.size() == 110);
  std::map<QuestionCategory, int> by_cat;
  for (const auto& q : questions) ++by_cat[q.category];
  auto share = [&](QuestionCategory c) {
    return 100.0 * by_cat[c] / questions.size();
  };
  CHECK(std::abs(share(QuestionCategory::single_doc) - 50.0) <= 5.0);
  CHECK(std::abs(share(QuestionCategory::aggregation) - 40.0) <= 5.0);
  CHECK(std::abs(share(QuestionCategory::probe) - 10.0) <= 5.0);
}

TEST_CASE("question ids are unique and ordered by level") {
  GroundTruthStore store = make_store(2);
  auto questions = make_questions(store, 2);
  std::set<std::string> ids;
  int last_level = 0;
  for (const auto& q : questions) {
    CHECK(ids.insert(q.question_id).second);
    CHECK(q.level >= last_level);
    last_level = q.level;
  }
}

TEST_CASE("every stored query recomputes to the stored key") {
  for (std::uint64_t seed : {3, 4, 5}) {
    GroundTruthStore store = make_store(seed);
    auto questions = make_questions(store, seed);
    int with_query = 0;
    for (const auto& q : questions) {
      if (!q.query) continue;
      ++with_query;
      CHECK(evaluate_query(store, *q.query) == q.answer_key);
    }
    CHECK(with_query > 0);
  }
}

TEST_CASE("probe questions carry sentinel keys and name unplaced entities") {
  GroundTruthStore store = make_store(6);
  std::set<std::string> placed_names;
  for (const auto& pool : store.pools)
    for (std::size_t i = 0; i < pool.used_count; ++i)
      placed_names.insert(pool.placed(i).display_name);

  auto questions = make_questions(store, 6);
  for (const auto& q : questions) {
    if (q.level == 11) {
      CHECK(q.answer_key == AnswerValue::unknown());
      for (const auto& name : placed_names)
        CHECK(q.text.find(name) == std::string::npos);
    }
    if (q.level == 12) CHECK(q.answer_key == AnswerValue::not_applicable());
  }
}

TEST_CASE("question text carries the right format instruction") {
  GroundTruthStore store = make_store(7);
  auto questions = make_questions(store, 7);
  for (const auto& q : questions) {
    if (q.scoring_type == ScoringType::numeric)
      CHECK(q.text.find("Reply with only the number.") != std::string::npos);
    else
      CHECK(q.text.find("Final answer:") != std::string::npos);
  }
}

TEST_CASE("emit and load round-trip, keys stay out of the public file") {
  std::string dir = scratch_dir("questions-emit");
  GroundTruthStore store = make_store(8);
  auto questions = make_questions(store, 8);
  std::string qpath = dir + "/questions.jsonl";
  std::string apath = dir + "/answers.jsonl";
  emit_question_set(questions, qpath, apath);

  auto metas = load_questions(qpath);
  REQUIRE(metas.size() == questions.size());
  for (std::size_t i = 0; i < metas.size(); ++i) {
    CHECK(metas[i].question_id == questions[i].question_id);
    CHECK(metas[i].level == questions[i].level);
    CHECK(metas[i].category == questions[i].category);
    CHECK(metas[i].scoring_type == questions[i].scoring_type);
    CHECK(metas[i].text == questions[i].text);
  }

  auto keys = load_answer_keys(apath);
  REQUIRE(keys.size() == questions.size());
  for (std::size_t i = 0; i < keys.size(); ++i)
    CHECK(keys[i].answer_key == questions[i].answer_key);

  // The public file must never contain key material.
  std::ifstream in(qpath);
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK_FALSE(j.contains("answer_key"));
    CHECK_FALSE(j.contains("query"));
  }
}

TEST_CASE("duplicate question ids are rejected at emit time") {
  std::string dir = scratch_dir("questions-dup");
  GroundTruthStore store = make_store(9);
  auto questions = make_questions(store, 9);
  questions[1].question_id = questions[0].question_id;
  CHECK_THROWS_AS(emit_question_set(questions, dir + "/q.jsonl",
                                    dir + "/a.jsonl"),
                  GenerationError);
}

TEST_CASE("explicit level counts override the shares") {
  QuestionMix mix;
  mix.total = 5;
  mix.level_counts = std::map<int, int>{{1, 2}, {5, 2}, {11, 1}};
  auto counts = plan_level_counts(mix);
  CHECK(counts == *mix.level_counts);
}

TEST_CASE("question generation is deterministic per seed") {
  GroundTruthStore s1 = make_store(10), s2 = make_store(10);
  auto q1 = make_questions(s1, 10);
  auto q2 = make_questions(s2, 10);
  REQUIRE(q1.size() == q2.size());
  for (std::size_t i = 0; i < q1.size(); ++i) {
    CHECK(q1[i].text == q2[i].text);
    CHECK(q1[i].answer_key == q2[i].answer_key);
  }
}
