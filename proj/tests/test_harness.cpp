#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include <httplib.h>

#include "riker/harness.hpp"
#include "riker/pipeline.hpp"
#include "test_util.hpp"

using namespace riker;

namespace {

// Minimal chat-completions stub with per-test behavior knobs.
class StubEndpoint {
 public:
  std::atomic<int> requests{0};
  std::atomic<int> fail_first_n{0};      // 500s before the first success
  std::string reply_text = "Final answer: 42";
  std::string finish_reason = "stop";
  bool echo_last_user_line = false;

  StubEndpoint() {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   ++requests;
                   if (fail_first_n.load() > 0) {
                     --fail_first_n;
                     res.status = 503;
                     res.set_content("overloaded", "text/plain");
                     return;
                   }
                   auto body = nlohmann::json::parse(req.body);
                   {
                     std::lock_guard<std::mutex> lock(mu_);
                     last_body_ = body;
                   }
                   std::string content = reply_text;
                   if (echo_last_user_line) {
                     std::string user =
                         body.at("messages").back().at("content");
                     auto pos = user.rfind("Question: ");
                     content = "echo: " + user.substr(pos);
                   }
                   nlohmann::json reply = {
                       {"choices",
                        {{{"message",
                           {{"role", "assistant"}, {"content", content}}},
                          {"finish_reason", finish_reason}}}},
                       {"usage",
                        {{"prompt_tokens", 100}, {"completion_tokens", 10}}}};
                   res.set_content(reply.dump(), "application/json");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) +
           "/v1/chat/completions";
  }

  nlohmann::json last_body() {
    std::lock_guard<std::mutex> lock(mu_);
    return last_body_;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mu_;
  nlohmann::json last_body_;
};

RunConfig stub_config(const StubEndpoint& stub) {
  RunConfig c;
  c.endpoint_url = stub.url();
  c.model_name = "stub-model";
  c.runs = 2;
  c.concurrency_limit = 3;
  c.retry_backoff_ms = 5;
  c.timeout_seconds = 10;
  return c;
}

struct EvalSetup {
  CorpusManifest manifest;
  std::string corpus_dir;
  std::vector<QuestionMeta> questions;
};

EvalSetup small_setup(const std::string& dir) {
  std::vector<RenderedDocument> docs;
  RenderedDocument d;
  d.doc_id = "lease-0001";
  d.doc_type = DocType::lease;
  d.title = "T";
  d.body = "Monthly Rent: $1,250.00\n";
  d.source_record_id = d.doc_id;
  d.token_estimate = 6;
  docs.push_back(d);
  write_documents(docs, dir + "/corpus");

  EvalSetup s;
  s.manifest = assemble(docs, "t", 1, "d", 4096, 0.85);
  s.corpus_dir = dir + "/corpus";
  for (int i = 0; i < 4; ++i) {
    QuestionMeta q;
    q.question_id = "q-L01-000" + std::to_string(i + 1);
    q.level = 1;
    q.category = QuestionCategory::single_doc;
    q.scoring_type = ScoringType::numeric;
    q.text = "What is the rent? Reply with only the number.";
    s.questions.push_back(std::move(q));
  }
  return s;
}

}  // namespace

TEST_CASE("prompt carries every document and the question") {
  std::string dir = scratch_dir("harness-prompt");
  EvalSetup s = small_setup(dir);
  std::string context = build_corpus_context(s.manifest, s.corpus_dir);
  CHECK(context.find("lease-0001") != std::string::npos);
  CHECK(context.find("Monthly Rent: $1,250.00") != std::string::npos);
  PromptMessages m = build_prompt(context, s.questions[0].text);
  CHECK(m.user.find("Question: What is the rent?") != std::string::npos);
  CHECK_FALSE(m.system.empty());
}

TEST_CASE("call_model parses replies and reports usage") {
  StubEndpoint stub;
  RunConfig config = stub_config(stub);
  auto r = call_model(config, {"sys", "user"}, "q-1", 0);
  CHECK(r.response_text == "Final answer: 42");
  CHECK(r.finish_state == FinishState::completed);
  CHECK(r.input_tokens == 100);
  CHECK(r.output_tokens == 10);
  CHECK(r.attempts == 1);
  CHECK(stub.last_body().at("model") == "stub-model");
  CHECK(stub.last_body().at("temperature").get<double>() ==
        doctest::Approx(0.4));
}

TEST_CASE("length finish reason becomes length_truncated") {
  StubEndpoint stub;
  stub.finish_reason = "length";
  auto r = call_model(stub_config(stub), {"s", "u"}, "q-1", 0);
  CHECK(r.finish_state == FinishState::length_truncated);
}

TEST_CASE("5xx responses are retried, then succeed") {
  StubEndpoint stub;
  stub.fail_first_n = 2;
  auto r = call_model(stub_config(stub), {"s", "u"}, "q-1", 0);
  CHECK(r.finish_state == FinishState::completed);
  CHECK(r.attempts == 3);
  CHECK(stub.requests == 3);
}

TEST_CASE("exhausted retries persist a transport_error result") {
  StubEndpoint stub;
  stub.fail_first_n = 100;
  auto r = call_model(stub_config(stub), {"s", "u"}, "q-1", 0);
  CHECK(r.finish_state == FinishState::transport_error);
  CHECK(r.attempts == 3);
}

TEST_CASE("4xx aborts instead of retrying") {
  httplib::Server server;
  server.Post("/v1/chat/completions",
              [](const httplib::Request&, httplib::Response& res) {
                res.status = 401;
                res.set_content("bad key", "text/plain");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  RunConfig config;
  config.endpoint_url =
      "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  config.model_name = "m";
  CHECK_THROWS_AS(call_model(config, {"s", "u"}, "q-1", 0), UsageError);
  server.stop();
  t.join();
}

TEST_CASE("run_evaluation persists runs x questions sorted, no duplicates") {
  std::string dir = scratch_dir("harness-run");
  EvalSetup s = small_setup(dir);
  StubEndpoint stub;
  RunConfig config = stub_config(stub);
  std::string results_path = dir + "/run.jsonl";
  EvalStats stats = run_evaluation(s.manifest, s.corpus_dir, s.questions,
                                   config, results_path);
  auto results = load_results(results_path);
  CHECK(results.size() == s.questions.size() * config.runs);
  CHECK(stats.input_tokens == 100 * static_cast<long long>(results.size()));

  std::set<std::pair<std::string, int>> pairs;
  for (const auto& r : results)
    CHECK(pairs.emplace(r.question_id, r.run_index).second);
  for (std::size_t i = 1; i < results.size(); ++i) {
    auto a = std::make_pair(results[i - 1].question_id,
                            results[i - 1].run_index);
    auto b = std::make_pair(results[i].question_id, results[i].run_index);
    CHECK(a < b);
  }
}

TEST_CASE("interrupted runs resume without duplicating work") {
  std::string dir = scratch_dir("harness-resume");
  EvalSetup s = small_setup(dir);
  StubEndpoint stub;
  RunConfig config = stub_config(stub);
  std::string results_path = dir + "/run.jsonl";

  EvalOptions first;
  first.attempt_limit = 3;
  run_evaluation(s.manifest, s.corpus_dir, s.questions, config, results_path,
                 first);
  auto partial = load_results(results_path);
  CHECK(partial.size() <= 3);
  int requests_before_resume = stub.requests.load();

  EvalOptions rest;
  rest.resume = true;
  run_evaluation(s.manifest, s.corpus_dir, s.questions, config, results_path,
                 rest);
  auto results = load_results(results_path);
  CHECK(results.size() == s.questions.size() * config.runs);
  std::set<std::pair<std::string, int>> pairs;
  for (const auto& r : results)
    CHECK(pairs.emplace(r.question_id, r.run_index).second);
  // Completed attempts were not re-sent.
  CHECK(stub.requests.load() - requests_before_resume ==
        static_cast<int>(results.size() - partial.size()));
}

TEST_CASE("run config validation rejects nonsense") {
  RunConfig c;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // missing endpoint/model
  c.endpoint_url = "http://localhost:1/v1/chat/completions";
  c.model_name = "m";
  c.validate();
  c.temperature = 9;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.temperature = 0.4;
  c.runs = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
