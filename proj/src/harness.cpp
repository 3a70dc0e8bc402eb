#include "riker/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "riker/rng.hpp"
#include "riker/tokens.hpp"

namespace riker {

namespace {

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ParsedUrl {
  std::string base;  // scheme://host:port
  std::string path;  // /v1/chat/completions
};

ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint url missing scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

void RunConfig::validate() const {
  if (endpoint_url.empty()) throw ConfigError("run config: endpoint_url is required");
  if (model_name.empty()) throw ConfigError("run config: model_name is required");
  if (temperature < 0 || temperature > 2)
    throw ConfigError("run config: temperature out of range");
  if (max_output_tokens <= 0)
    throw ConfigError("run config: max_output_tokens must be positive");
  if (runs <= 0) throw ConfigError("run config: runs must be positive");
  if (concurrency_limit <= 0)
    throw ConfigError("run config: concurrency_limit must be positive");
  if (retry_max_attempts <= 0)
    throw ConfigError("run config: retry_max_attempts must be positive");
  if (api_key_env.empty())
    throw ConfigError("run config: api_key_env is required");
  parse_url(endpoint_url);
}

nlohmann::json RunConfig::to_json() const {
  return {{"endpoint_url", endpoint_url},
          {"model_name", model_name},
          {"temperature", temperature},
          {"max_output_tokens", max_output_tokens},
          {"runs", runs},
          {"concurrency_limit", concurrency_limit},
          {"retry_max_attempts", retry_max_attempts},
          {"retry_backoff_ms", retry_backoff_ms},
          {"timeout_seconds", timeout_seconds},
          {"api_key_env", api_key_env}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  c.endpoint_url = j.at("endpoint_url").get<std::string>();
  c.model_name = j.at("model_name").get<std::string>();
  if (j.contains("temperature")) c.temperature = j["temperature"].get<double>();
  if (j.contains("max_output_tokens"))
    c.max_output_tokens = j["max_output_tokens"].get<int>();
  if (j.contains("runs")) c.runs = j["runs"].get<int>();
  if (j.contains("concurrency_limit"))
    c.concurrency_limit = j["concurrency_limit"].get<int>();
  if (j.contains("retry_max_attempts"))
    c.retry_max_attempts = j["retry_max_attempts"].get<int>();
  if (j.contains("retry_backoff_ms"))
    c.retry_backoff_ms = j["retry_backoff_ms"].get<int>();
  if (j.contains("timeout_seconds"))
    c.timeout_seconds = j["timeout_seconds"].get<int>();
  if (j.contains("api_key_env"))
    c.api_key_env = j["api_key_env"].get<std::string>();
  c.validate();
  return c;
}

nlohmann::json RawResult::to_json() const {
  return {{"question_id", question_id},
          {"run_index", run_index},
          {"request_digest", request_digest},
          {"response_text", response_text},
          {"finish_state", finish_state_name(finish_state)},
          {"input_tokens", input_tokens},
          {"output_tokens", output_tokens},
          {"latency_ms", latency_ms},
          {"timestamp", timestamp},
          {"attempts", attempts}};
}

RawResult RawResult::from_json(const nlohmann::json& j) {
  RawResult r;
  r.question_id = j.at("question_id").get<std::string>();
  r.run_index = j.at("run_index").get<int>();
  r.request_digest = j.value("request_digest", "");
  r.response_text = j.value("response_text", "");
  r.finish_state = finish_state_from_name(j.at("finish_state").get<std::string>());
  r.input_tokens = j.value("input_tokens", 0LL);
  r.output_tokens = j.value("output_tokens", 0LL);
  r.latency_ms = j.value("latency_ms", 0.0);
  r.timestamp = j.value("timestamp", "");
  r.attempts = j.value("attempts", 1);
  return r;
}

std::string build_corpus_context(const CorpusManifest& manifest,
                                 const std::string& corpus_dir) {
  std::string out;
  for (const auto& entry : manifest.index) {
    out += "=== Document " + entry.doc_id + " (" +
           doc_type_name(entry.doc_type) + ") ===\n";
    out += read_document(corpus_dir, entry);
    if (out.empty() || out.back() != '\n') out += '\n';
    out += '\n';
  }
  return out;
}

PromptMessages build_prompt(const std::string& corpus_context,
                            const std::string& question_text) {
  PromptMessages m;
  m.system =
      "You answer questions using only the document collection provided by "
      "the user. If the documents do not contain the answer, say so.";
  m.user = corpus_context + "Question: " + question_text;
  return m;
}

RawResult call_model(const RunConfig& config, const PromptMessages& messages,
                     const std::string& question_id, int run_index) {
  ParsedUrl url = parse_url(config.endpoint_url);

  nlohmann::json body = {
      {"model", config.model_name},
      {"messages",
       {{{"role", "system"}, {"content", messages.system}},
        {{"role", "user"}, {"content", messages.user}}}},
      {"temperature", config.temperature},
      {"max_tokens", config.max_output_tokens}};
  std::string body_str = body.dump();

  httplib::Headers headers;
  const char* key = std::getenv(config.api_key_env.c_str());
  if (key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);

  RawResult result;
  result.question_id = question_id;
  result.run_index = run_index;
  result.request_digest = fnv1a_hex(body_str);

  auto start = std::chrono::steady_clock::now();
  for (int attempt = 1; attempt <= config.retry_max_attempts; ++attempt) {
    result.attempts = attempt;
    httplib::Client client(url.base);
    client.set_connection_timeout(config.timeout_seconds, 0);
    client.set_read_timeout(config.timeout_seconds, 0);
    client.set_write_timeout(config.timeout_seconds, 0);

    auto res = client.Post(url.path, headers, body_str, "application/json");
    bool retryable = false;
    if (!res) {
      retryable = true;
    } else if (res->status >= 500) {
      retryable = true;
    } else if (res->status >= 400) {
      throw UsageError("endpoint returned " +
                               std::to_string(res->status) + " for " +
                               question_id + ": " + res->body);
    } else {
      nlohmann::json reply;
      try {
        reply = nlohmann::json::parse(res->body);
        const auto& choice = reply.at("choices").at(0);
        result.response_text =
            choice.at("message").at("content").get<std::string>();
        std::string finish = choice.value("finish_reason", "stop");
        result.finish_state = finish == "length" ? FinishState::length_truncated
                                                 : FinishState::completed;
        if (reply.contains("usage")) {
          result.input_tokens = reply["usage"].value("prompt_tokens", 0LL);
          result.output_tokens = reply["usage"].value("completion_tokens", 0LL);
        }
      } catch (const nlohmann::json::exception&) {
        retryable = true;  // malformed payload, same as a transport fault
      }
      if (!retryable) {
        if (result.input_tokens == 0)
          result.input_tokens = estimate_tokens(messages.system) +
                                estimate_tokens(messages.user);
        if (result.output_tokens == 0)
          result.output_tokens = estimate_tokens(result.response_text);
        auto end = std::chrono::steady_clock::now();
        result.latency_ms =
            std::chrono::duration<double, std::milli>(end - start).count();
        result.timestamp = utc_timestamp();
        return result;
      }
    }
    if (retryable && attempt < config.retry_max_attempts) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config.retry_backoff_ms * attempt));
    }
  }

  result.finish_state = FinishState::transport_error;
  result.response_text.clear();
  result.input_tokens =
      estimate_tokens(messages.system) + estimate_tokens(messages.user);
  result.output_tokens = 0;
  auto end = std::chrono::steady_clock::now();
  result.latency_ms =
      std::chrono::duration<double, std::milli>(end - start).count();
  result.timestamp = utc_timestamp();
  return result;
}

std::vector<RawResult> load_results(const std::string& path) {
  std::vector<RawResult> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(RawResult::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

namespace {

void write_sorted(const std::string& path, std::vector<RawResult> results) {
  std::sort(results.begin(), results.end(),
            [](const RawResult& a, const RawResult& b) {
              if (a.question_id != b.question_id)
                return a.question_id < b.question_id;
              return a.run_index < b.run_index;
            });
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw UsageError("cannot write results file: " + path);
    for (const auto& r : results) out << r.to_json().dump() << '\n';
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw UsageError("cannot finalize results file: " + path);
}

}  // namespace

EvalStats run_evaluation(const CorpusManifest& manifest,
                         const std::string& corpus_dir,
                         const std::vector<QuestionMeta>& questions,
                         const RunConfig& config,
                         const std::string& results_path,
                         const EvalOptions& options) {
  config.validate();
  auto wall_start = std::chrono::steady_clock::now();

  std::vector<RawResult> done;
  std::set<std::pair<std::string, int>> seen;
  if (options.resume) {
    done = load_results(results_path);
    for (const auto& r : done) seen.emplace(r.question_id, r.run_index);
  }

  struct Task {
    std::size_t question_idx;
    int run_index;
  };
  std::vector<Task> tasks;
  for (int run = 0; run < config.runs; ++run) {
    for (std::size_t qi = 0; qi < questions.size(); ++qi) {
      if (seen.count({questions[qi].question_id, run})) continue;
      tasks.push_back({qi, run});
    }
  }

  std::string context = build_corpus_context(manifest, corpus_dir);

  std::mutex mu;
  std::ofstream log(results_path, options.resume ? std::ios::app : std::ios::trunc);
  if (!log) throw UsageError("cannot open results file: " + results_path);

  EvalStats stats;
  std::atomic<std::size_t> next{0};
  std::atomic<long long> persisted{0};
  std::atomic<bool> abort_flag{false};
  std::exception_ptr fatal;

  auto worker = [&]() {
    while (!abort_flag.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      if (options.attempt_limit >= 0 &&
          persisted.load() >= options.attempt_limit) {
        abort_flag.store(true);
        return;
      }
      const Task& t = tasks[i];
      const QuestionMeta& q = questions[t.question_idx];
      try {
        PromptMessages prompt = build_prompt(context, q.text);
        RawResult r = call_model(config, prompt, q.question_id, t.run_index);
        std::lock_guard<std::mutex> lock(mu);
        if (options.attempt_limit >= 0 &&
            persisted.load() >= options.attempt_limit) {
          abort_flag.store(true);
          return;
        }
        log << r.to_json().dump() << '\n';
        log.flush();
        persisted.fetch_add(1);
        done.push_back(r);
        stats.attempts += r.attempts;
        stats.input_tokens += r.input_tokens;
        stats.output_tokens += r.output_tokens;
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!fatal) fatal = std::current_exception();
        abort_flag.store(true);
        return;
      }
    }
  };

  int workers = std::min<int>(config.concurrency_limit,
                              std::max<std::size_t>(tasks.size(), 1));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  log.close();

  if (fatal) std::rethrow_exception(fatal);

  write_sorted(results_path, done);

  auto wall_end = std::chrono::steady_clock::now();
  stats.wall_seconds =
      std::chrono::duration<double>(wall_end - wall_start).count();
  return stats;
}

}  // namespace riker
