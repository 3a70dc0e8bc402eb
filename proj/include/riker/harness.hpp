#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riker/corpus.hpp"
#include "riker/questions.hpp"
#include "riker/scoring.hpp"

namespace riker {

struct RunConfig {
  std::string endpoint_url;  // chat-completions compatible endpoint
  std::string model_name;
  double temperature = 0.4;
  int max_output_tokens = 4096;
  int runs = 8;
  int concurrency_limit = 4;
  int retry_max_attempts = 3;
  int retry_backoff_ms = 250;
  int timeout_seconds = 300;
  // Credentials come from the environment, never from config files.
  std::string api_key_env = "RIKER_API_KEY";

  void validate() const;
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

struct RawResult {
  std::string question_id;
  int run_index = 0;
  std::string request_digest;
  std::string response_text;
  FinishState finish_state = FinishState::completed;
  long long input_tokens = 0;
  long long output_tokens = 0;
  double latency_ms = 0;
  std::string timestamp;
  int attempts = 1;

  nlohmann::json to_json() const;
  static RawResult from_json(const nlohmann::json& j);
};

struct PromptMessages {
  std::string system;
  std::string user;
};

// All documents concatenated in manifest order with type/id headers; the
// question (with its format instruction) follows. Byte-stable per input.
std::string build_corpus_context(const CorpusManifest& manifest,
                                 const std::string& corpus_dir);
PromptMessages build_prompt(const std::string& corpus_context,
                            const std::string& question_text);

// One POST per attempt; retries only transport failures and 5xx. A 4xx is a
// configuration problem and aborts the run. Exhausted retries yield a
// persisted transport_error result, never a dropped record.
RawResult call_model(const RunConfig& config, const PromptMessages& messages,
                     const std::string& question_id, int run_index);

struct EvalOptions {
  bool resume = false;
  // Stop after this many newly persisted records (testing seam for the
  // kill-and-resume chaos protocol). Negative = unlimited.
  long long attempt_limit = -1;
};

struct EvalStats {
  long long attempts = 0;
  long long input_tokens = 0;
  long long output_tokens = 0;
  double wall_seconds = 0;
};

// runs x |questions| attempts, bounded concurrency, resumable via the
// persisted results file. Never touches the answer-key file.
EvalStats run_evaluation(const CorpusManifest& manifest,
                         const std::string& corpus_dir,
                         const std::vector<QuestionMeta>& questions,
                         const RunConfig& config,
                         const std::string& results_path,
                         const EvalOptions& options = {});

std::vector<RawResult> load_results(const std::string& path);

}  // namespace riker
