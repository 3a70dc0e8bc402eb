#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "riker/answer_value.hpp"
#include "riker/questions.hpp"

namespace riker {

enum class FinishState { completed, length_truncated, transport_error };
std::string finish_state_name(FinishState s);
FinishState finish_state_from_name(const std::string& s);

enum class Verdict { correct, incorrect, unscorable };
std::string verdict_name(Verdict v);

enum class ResponseFlag { fabricated, coherence_loss, format_violation };
std::string flag_name(ResponseFlag f);

struct ScoredResponse {
  std::string question_id;
  int run_index = 0;
  std::string raw_text;
  FinishState finish_state = FinishState::completed;
  std::optional<std::string> extracted_answer;
  Verdict verdict = Verdict::incorrect;
  std::set<ResponseFlag> flags;

  nlohmann::json to_json() const;
  static ScoredResponse from_json(const nlohmann::json& j);
};

// Unknown-class / NA-class equivalence phrases; data files under
// data/lexicons, versioned with the repo.
struct SentinelLexicons {
  std::vector<std::string> unknown_class;
  std::vector<std::string> na_class;
  static SentinelLexicons load(const std::string& data_dir);

  bool is_unknown_class(const std::string& normalized) const;
  bool is_na_class(const std::string& normalized) const;
};

// Last "Final answer:" marker wins; otherwise the final non-empty line.
// Returns nullopt only for all-whitespace input.
std::optional<std::string> extract_answer(const std::string& raw_text);

// Lowercase, whitespace-collapsed, wrapper punctuation stripped.
std::string normalize_answer_text(const std::string& s);

Verdict score_exact(const std::string& extracted, const AnswerValue& key);
// Sets *format_violation when no numeric token parses.
Verdict score_numeric(const std::string& extracted, const AnswerValue& key,
                      bool* format_violation);
Verdict score_set(const std::string& extracted, const AnswerValue& key);
Verdict score_semantic(const std::string& extracted, const AnswerValue& key,
                       const SentinelLexicons& lexicons);

bool detect_coherence_loss(FinishState finish_state);

struct QuestionForScoring {
  std::string question_id;
  QuestionCategory category = QuestionCategory::single_doc;
  ScoringType scoring_type = ScoringType::numeric;
  AnswerValue answer_key;
};

// Pure and total: identical inputs always yield the identical record.
ScoredResponse score_response(const QuestionForScoring& question,
                              const std::string& raw_text,
                              FinishState finish_state,
                              const SentinelLexicons& lexicons,
                              int run_index = 0);

}  // namespace riker
