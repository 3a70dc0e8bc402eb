#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "riker/answer_value.hpp"
#include "riker/ground_truth.hpp"
#include "riker/rng.hpp"

namespace riker {

enum class QuestionCategory { single_doc, aggregation, probe };
std::string category_name(QuestionCategory c);

// Category is a pure function of level: L01-L04 single-doc,
// L05-L10 aggregation, L11-L12 probe.
QuestionCategory category_for_level(int level);

enum class ScoringType { exact, numeric, set_match, semantic };
std::string scoring_type_name(ScoringType t);
ScoringType scoring_type_from_name(const std::string& s);

struct Question {
  std::string question_id;
  int level = 1;  // 1..12
  QuestionCategory category = QuestionCategory::single_doc;
  ScoringType scoring_type = ScoringType::numeric;
  std::string text;  // includes the format instruction
  AnswerValue answer_key;
  std::vector<std::string> provenance;  // source doc ids
  std::optional<AnswerQuery> query;     // set for aggregation questions

  std::string level_label() const;  // "L05"
};

struct QuestionMix {
  int total = 110;
  double single_doc_share = 0.5;
  double aggregation_share = 0.4;
  double probe_share = 0.1;
  // Explicit per-level override; when set, the shares are ignored.
  std::optional<std::map<int, int>> level_counts;
};

// Splits the mix into per-level counts (uniform within each category).
std::map<int, int> plan_level_counts(const QuestionMix& mix);

std::vector<Question> generate_single_doc(const GroundTruthStore& store,
                                          const std::map<int, int>& counts,
                                          RandomStream& stream);
std::vector<Question> generate_aggregation(const GroundTruthStore& store,
                                           const std::map<int, int>& counts,
                                           RandomStream& stream);
// Consumes reserve entities from the store's pools as probes need them.
std::vector<Question> generate_probes(GroundTruthStore& store,
                                      const std::map<int, int>& counts,
                                      RandomStream& stream);

// Full set in level order with sequential ids.
std::vector<Question> generate_question_set(GroundTruthStore& store,
                                            const QuestionMix& mix,
                                            RandomStream& stream);

// Public question file (no keys) and private key file, both JSONL in the
// same deterministic order.
void emit_question_set(const std::vector<Question>& questions,
                       const std::string& questions_path,
                       const std::string& answers_path);

// Question metadata without keys (the harness-side view).
struct QuestionMeta {
  std::string question_id;
  int level = 1;
  QuestionCategory category = QuestionCategory::single_doc;
  ScoringType scoring_type = ScoringType::numeric;
  std::string text;
};
std::vector<QuestionMeta> load_questions(const std::string& path);

struct AnswerKeyEntry {
  std::string question_id;
  AnswerValue answer_key;
};
std::vector<AnswerKeyEntry> load_answer_keys(const std::string& path);

}  // namespace riker
