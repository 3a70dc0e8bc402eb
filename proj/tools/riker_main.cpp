#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "riker/corpus.hpp"
#include "riker/harness.hpp"
#include "riker/metrics.hpp"
#include "riker/pipeline.hpp"
#include "riker/pipeline_config.hpp"
#include "riker/scoring.hpp"
#include "riker/sqlite_store.hpp"

namespace {

// Exit codes: 0 ok, 1 unexpected, 2 usage, 3 config, 4 generation/coherence,
// 5 sizing, 6 verification failed. CLI parse errors use CLI11's own codes.
constexpr int kExitUnexpected = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitGeneration = 4;
constexpr int kExitSizing = 5;
constexpr int kExitVerifyFailed = 6;

std::string default_data_dir() { return std::string(RIKER_SOURCE_DIR) + "/data"; }

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    seeds.push_back(std::stoull(token));
  }
  if (seeds.empty()) throw riker::UsageError("--seeds: no seeds given");
  return seeds;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw riker::UsageError("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::vector<riker::ScoredResponse> load_scored(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw riker::UsageError("missing scored file: " + path);
  std::vector<riker::ScoredResponse> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(riker::ScoredResponse::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

void cmd_generate(const std::string& config_path, std::uint64_t seed,
                  const std::string& out_dir, const std::string& data_dir) {
  riker::PipelineConfig config = riker::PipelineConfig::load(config_path);
  riker::GenerateResult result =
      riker::generate_universe(config, seed, data_dir);
  riker::ArtifactPaths paths{out_dir};
  riker::write_generate_artifacts(result, paths);
  std::cout << "generated " << result.manifest.index.size() << " documents, "
            << result.manifest.token_total << " estimated tokens, into "
            << out_dir << "\n";
}

void cmd_questions(const std::string& config_path, const std::string& out_dir) {
  riker::PipelineConfig config = riker::PipelineConfig::load(config_path);
  riker::ArtifactPaths paths{out_dir};
  auto questions = riker::run_question_stage(config, paths);
  std::cout << "emitted " << questions.size() << " questions to "
            << paths.questions_path() << "\n";
}

void cmd_eval(const std::string& out_dir, riker::RunConfig run_config,
              bool resume) {
  riker::ArtifactPaths paths{out_dir};
  riker::CorpusManifest manifest =
      riker::load_manifest(paths.manifest_path());
  auto questions = riker::load_questions(paths.questions_path());
  std::filesystem::create_directories(paths.results_dir(run_config.model_name));
  std::string results_path =
      paths.results_dir(run_config.model_name) + "/run.jsonl";

  riker::EvalOptions options;
  options.resume = resume;
  riker::EvalStats stats = riker::run_evaluation(
      manifest, paths.corpus_dir(), questions, run_config, results_path,
      options);

  nlohmann::json metadata = {{"run_config", run_config.to_json()},
                             {"attempts", stats.attempts},
                             {"input_tokens", stats.input_tokens},
                             {"output_tokens", stats.output_tokens},
                             {"wall_seconds", stats.wall_seconds}};
  write_json_file(metadata,
                  paths.results_dir(run_config.model_name) + "/run_meta.json");
  std::cout << "evaluation complete: " << stats.attempts << " attempts, "
            << stats.input_tokens << " input / " << stats.output_tokens
            << " output tokens\n";
}

void cmd_score(const std::string& out_dir, const std::string& model,
               const std::string& data_dir) {
  riker::ArtifactPaths paths{out_dir};
  auto questions = riker::load_questions(paths.questions_path());
  auto keys = riker::load_answer_keys(paths.answers_path());
  std::map<std::string, riker::AnswerValue> key_by_id;
  for (auto& k : keys) key_by_id.emplace(k.question_id, k.answer_key);

  auto lexicons = riker::SentinelLexicons::load(data_dir);
  auto results =
      riker::load_results(paths.results_dir(model) + "/run.jsonl");
  if (results.empty())
    throw riker::UsageError("no results found for model " + model + " under " +
                            paths.results_dir(model));

  std::map<std::string, const riker::QuestionMeta*> q_by_id;
  for (auto& q : questions) q_by_id.emplace(q.question_id, &q);

  std::filesystem::create_directories(paths.root + "/scored");
  std::ofstream out(paths.scored_path(model), std::ios::trunc);
  if (!out) throw riker::UsageError("cannot write " + paths.scored_path(model));
  for (const auto& r : results) {
    auto qit = q_by_id.find(r.question_id);
    auto kit = key_by_id.find(r.question_id);
    if (qit == q_by_id.end() || kit == key_by_id.end())
      throw riker::UsageError("result references unknown question id: " +
                              r.question_id);
    riker::QuestionForScoring q;
    q.question_id = r.question_id;
    q.category = qit->second->category;
    q.scoring_type = qit->second->scoring_type;
    q.answer_key = kit->second;
    riker::ScoredResponse scored = riker::score_response(
        q, r.response_text, r.finish_state, lexicons, r.run_index);
    out << scored.to_json().dump() << '\n';
  }
  std::cout << "scored " << results.size() << " responses to "
            << paths.scored_path(model) << "\n";
}

void cmd_report(const std::string& out_dir,
                const std::vector<std::string>& models) {
  riker::ArtifactPaths paths{out_dir};
  auto questions = riker::load_questions(paths.questions_path());
  std::vector<riker::MetricsSummary> summaries;
  for (const auto& model : models) {
    auto scored = load_scored(paths.scored_path(model));
    summaries.push_back(riker::summarize(model, scored, questions));
  }
  riker::render_report(summaries, paths.reports_dir());
  std::cout << "reports written to " << paths.reports_dir() << "\n";
}

void cmd_stability(const std::string& config_path, const std::string& seed_csv,
                   const std::string& out_dir, const std::string& model,
                   const std::string& data_dir) {
  riker::PipelineConfig config = riker::PipelineConfig::load(config_path);
  auto seeds = parse_seed_list(seed_csv);

  std::vector<riker::StabilityRow> rows;
  std::vector<double> values;
  bool have_accuracy = !model.empty();

  for (auto seed : seeds) {
    std::string set_id = "set-" + std::to_string(seed);
    riker::ArtifactPaths paths{out_dir + "/" + set_id};
    riker::GenerateResult result =
        riker::generate_universe(config, seed, data_dir);
    riker::write_generate_artifacts(result, paths);
    riker::run_question_stage(config, paths);

    double value;
    std::string metric;
    if (have_accuracy) {
      auto scored = load_scored(paths.scored_path(model));
      auto questions = riker::load_questions(paths.questions_path());
      value = riker::summarize(model, scored, questions).overall_accuracy * 100;
      metric = "overall_accuracy";
    } else {
      value = static_cast<double>(result.manifest.token_total);
      metric = "token_total";
    }
    rows.push_back({set_id, metric, value});
    values.push_back(value);
    std::cout << set_id << ": " << result.store.leases.size() << " leases, "
              << result.manifest.token_total << " tokens\n";
  }

  riker::StabilityStats stats = riker::stability_stats(values);
  riker::render_stability_csv(rows, stats, out_dir + "/stability.csv");
  std::cout << "stability: mean " << stats.mean << ", spread " << stats.spread
            << ", cv " << stats.cv * 100 << "% -> " << out_dir
            << "/stability.csv\n";
}

int cmd_verify(const std::string& out_dir) {
  riker::ArtifactPaths paths{out_dir};
  auto problems = riker::verify_artifacts(paths);
  if (problems.empty()) {
    std::cout << "verify: all invariants hold for " << out_dir << "\n";
    return 0;
  }
  for (const auto& p : problems) std::cerr << "error: verify: " << p << "\n";
  return kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic document benchmark pipeline"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", data_dir = default_data_dir();
  std::uint64_t seed = 1;
  std::string seed_csv;
  std::string model, endpoint;
  std::vector<std::string> models;
  double temperature = 0.4;
  int runs = 8, max_output_tokens = 4096, concurrency = 4;
  bool resume = false;

  auto* gen = app.add_subcommand("generate", "Generate corpus and ground truth");
  gen->add_option("--config", config_path, "Pipeline config JSON")->required();
  gen->add_option("--seed", seed, "Master seed");
  gen->add_option("--out", out_dir, "Output directory");
  gen->add_option("--data-dir", data_dir, "Template and lexicon directory");

  auto* ques = app.add_subcommand("questions", "Emit question and key files");
  ques->add_option("--config", config_path, "Pipeline config JSON")->required();
  ques->add_option("--out", out_dir, "Artifact directory");

  auto* eval = app.add_subcommand("eval", "Run the evaluation harness");
  eval->add_option("--out", out_dir, "Artifact directory");
  eval->add_option("--endpoint", endpoint, "Chat-completions endpoint URL")
      ->required();
  eval->add_option("--model", model, "Model name")->required();
  eval->add_option("--runs", runs, "Repeated runs per question");
  eval->add_option("--temperature", temperature, "Sampling temperature");
  eval->add_option("--max-output-tokens", max_output_tokens,
                   "Response token cap");
  eval->add_option("--concurrency", concurrency, "Concurrent requests");
  eval->add_flag("--resume", resume, "Resume an interrupted run");

  auto* score = app.add_subcommand("score", "Score raw results against keys");
  score->add_option("--out", out_dir, "Artifact directory");
  score->add_option("--model", model, "Model name")->required();
  score->add_option("--data-dir", data_dir, "Lexicon directory");

  auto* report = app.add_subcommand("report", "Aggregate scored responses");
  report->add_option("--out", out_dir, "Artifact directory");
  report->add_option("--model", models, "Model name (repeatable)")->required();

  auto* stability =
      app.add_subcommand("stability", "Multi-seed regeneration and stats");
  stability->add_option("--config", config_path, "Pipeline config JSON")
      ->required();
  stability->add_option("--seeds", seed_csv, "Comma-separated seeds")
      ->required();
  stability->add_option("--out", out_dir, "Output directory");
  stability->add_option("--model", model,
                        "Compute accuracy stats from this model's scored files");
  stability->add_option("--data-dir", data_dir,
                        "Template and lexicon directory");

  auto* verify = app.add_subcommand("verify", "Re-check artifact invariants");
  verify->add_option("--out", out_dir, "Artifact directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      cmd_generate(config_path, seed, out_dir, data_dir);
    } else if (ques->parsed()) {
      cmd_questions(config_path, out_dir);
    } else if (eval->parsed()) {
      riker::RunConfig rc;
      rc.endpoint_url = endpoint;
      rc.model_name = model;
      rc.temperature = temperature;
      rc.runs = runs;
      rc.max_output_tokens = max_output_tokens;
      rc.concurrency_limit = concurrency;
      rc.validate();
      cmd_eval(out_dir, rc, resume);
    } else if (score->parsed()) {
      cmd_score(out_dir, model, data_dir);
    } else if (report->parsed()) {
      cmd_report(out_dir, models);
    } else if (stability->parsed()) {
      cmd_stability(config_path, seed_csv, out_dir, model, data_dir);
    } else if (verify->parsed()) {
      return cmd_verify(out_dir);
    }
  } catch (const riker::SizingError& e) {
    std::cerr << "error: sizing: " << e.what() << "\n";
    return kExitSizing;
  } catch (const riker::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const riker::GenerationError& e) {
    std::cerr << "error: generation: " << e.what() << "\n";
    return kExitGeneration;
  } catch (const riker::UsageError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnexpected;
  }
  return 0;
}
