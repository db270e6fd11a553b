#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "trirank/ingest.hpp"
#include "trirank/io_util.hpp"
#include "trirank/judgeclient.hpp"

using namespace trirank;

namespace {

ResponseTable graded_table() {
  // Response strings order the models lexicographically: A > B > C.
  ResponseTable t;
  for (const char* m : {"A", "B", "C"}) t.add_model(m);
  for (const char* p : {"p0", "p1"}) t.add_prompt(p);
  for (const auto& p : t.prompts()) {
    t.set("A", p, "cc " + p);
    t.set("B", p, "bb " + p);
    t.set("C", p, "aa " + p);
  }
  return t;
}

std::string between(const std::string& s, const std::string& a,
                    const std::string& b) {
  auto i = s.find(a);
  REQUIRE(i != std::string::npos);
  i += a.size();
  auto j = s.find(b, i);
  REQUIRE(j != std::string::npos);
  return s.substr(i, j - i);
}

struct ScriptedTransport final : JudgeTransport {
  std::function<std::string(const std::string&)> fn;
  std::atomic<int> calls{0};
  explicit ScriptedTransport(std::function<std::string(const std::string&)> f)
      : fn(std::move(f)) {}
  std::string complete(const std::string& prompt) override {
    ++calls;
    return fn(prompt);
  }
};

// Judges by comparing the two embedded responses as strings.
std::string lexicographic_judge(const std::string& prompt) {
  std::string r1 = between(prompt, "###Response 1:\n", "\n###Response 2:");
  std::string r2 = between(prompt, "###Response 2:\n", "\n###Score Rubric:");
  return "The first looks " + std::string(r1 > r2 ? "better" : "worse") +
         ". [RESULT] " + (r1 > r2 ? "1" : "2");
}

struct CacheFile {
  std::string path = "trirank_judge_cache_test.jsonl";
  CacheFile() { std::remove(path.c_str()); }
  ~CacheFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("render_prompt emits the exact judging template") {
  std::string p = render_prompt("INS", "R1", "R2", "RUB");
  const std::string expect =
      "###Task Description:\n"
      "An instruction (might include an Input inside it), \n"
      "a response to evaluate, and a score rubric \n"
      "representing  a evaluation criteria are given.\n"
      "1. Write a detailed feedback that assess the \n"
      "quality of two responses strictly based on the \n"
      "given score rubric, not evaluating in general.\n"
      "2. After writing a feedback, choose a better \n"
      "response between Response 1 and Response 2. \n"
      "You should refer to the score rubric.\n"
      "3. The output format should look as follows: \n"
      "\"Feedback: (write a feedback for criteria) \n"
      "[RESULT] (1 or 2)\"\n"
      "4. Please do not generate any other opening, \n"
      "closing, and explanations.\n"
      "###Instruction:\n"
      "INS\n"
      "###Response 1:\n"
      "R1\n"
      "###Response 2:\n"
      "R2\n"
      "###Score Rubric:\n"
      "RUB\n"
      "###Feedback: \n";
  CHECK(p == expect);
  // Only the first occurrence of each slot is substituted, so responses that
  // themselves contain a slot token cannot double-substitute.
  std::string tricky = render_prompt("{response_1}", "safe", "x", "r");
  CHECK(tricky.find("{response_1}") != std::string::npos);
}

TEST_CASE("parse_verdict accepts the formats judges actually produce") {
  CHECK(parse_verdict("Feedback ok. [RESULT] 1") == 1);
  CHECK(parse_verdict("[RESULT] 2") == 2);
  CHECK(parse_verdict("[RESULT]2") == 2);
  CHECK(parse_verdict("[RESULT] (2)") == 2);
  CHECK(parse_verdict("[RESULT]: 1.") == 1);
  CHECK(parse_verdict("first [RESULT] 1 then [RESULT] 2") == 2);
  CHECK(parse_verdict("no marker here, 1") == 0);
  CHECK(parse_verdict("[RESULT]") == 0);
  CHECK(parse_verdict("[RESULT] three") == 0);
  CHECK(parse_verdict("[RESULT] 3") == 0);
  CHECK(parse_verdict("[RESULT] 12") == 0);
  CHECK(parse_verdict("") == 0);
}

TEST_CASE("judge_rank ranks by win rate over sampled prompts") {
  auto table = graded_table();
  ScriptedTransport transport(lexicographic_judge);
  JudgeEndpointConfig config;
  Rng rng(21);
  auto res = judge_rank(table, config, 2, rng, transport);
  CHECK(res.ranking.ranking == Ranking{"A", "B", "C"});
  CHECK(res.ranking.scores[0] == doctest::Approx(1.0));
  CHECK(res.ranking.scores[1] == doctest::Approx(0.5));
  CHECK(res.ranking.scores[2] == doctest::Approx(0.0));
  CHECK(res.judgements.size() == 3 * 2);  // 3 pairs x 2 prompts
  CHECK(res.unparseable == 0);
  CHECK(res.from_cache == 0);
  CHECK(transport.calls == 6);
  // Canonical order: pair (A,B) first, model_1 always the lower index.
  CHECK(res.judgements[0].model_1 == "A");
  CHECK(res.judgements[0].model_2 == "B");
  CHECK(res.judgements[4].model_1 == "B");
  CHECK(res.judgements[4].model_2 == "C");
}

TEST_CASE("a judge that always says 1 reproduces first-position bias") {
  auto table = graded_table();
  ScriptedTransport transport(
      [](const std::string&) { return std::string("[RESULT] 1"); });
  JudgeEndpointConfig config;
  Rng rng(3);
  auto res = judge_rank(table, config, 1, rng, transport);
  // Lower table index always presented first, so it always wins.
  CHECK(res.ranking.ranking == Ranking{"A", "B", "C"});
  CHECK(res.ranking.scores[0] == doctest::Approx(1.0));
  CHECK(res.ranking.scores[1] == doctest::Approx(0.5));
  CHECK(res.ranking.scores[2] == doctest::Approx(0.0));
}

TEST_CASE("unparseable verdicts drop out of both sides of the rate") {
  auto table = graded_table();
  ScriptedTransport transport([](const std::string& prompt) {
    if (prompt.find("###Response 2:\nbb") != std::string::npos)
      return std::string("mumble");  // every (A,B) comparison unparseable
    return lexicographic_judge(prompt);
  });
  JudgeEndpointConfig config;
  Rng rng(21);
  auto res = judge_rank(table, config, 2, rng, transport);
  CHECK(res.unparseable == 2);
  // With every (A,B) comparison gone, both A and B win all their remaining
  // judgements; the input-order tie-break keeps A first.
  CHECK(res.ranking.ranking == Ranking{"A", "B", "C"});
  CHECK(res.ranking.scores[0] == doctest::Approx(1.0));
  CHECK(res.ranking.scores[1] == doctest::Approx(1.0));
  CHECK(res.ranking.scores[2] == doctest::Approx(0.0));
}

TEST_CASE("judge cache fills in canonical order and resumes") {
  auto table = graded_table();
  CacheFile cache;
  JudgeEndpointConfig config;

  {
    ScriptedTransport transport(lexicographic_judge);
    Rng rng(8);
    auto res = judge_rank(table, config, 2, rng, transport, cache.path);
    CHECK(transport.calls == 6);
    CHECK(res.from_cache == 0);
  }

  std::string content = read_text_file(cache.path);
  auto lines = split_lines(content);
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  REQUIRE(lines.size() == 6);
  // Pair-major order regardless of which worker finished first.
  CHECK(lines[0].find("\"model_1\":\"A\"") != std::string::npos);
  CHECK(lines[0].find("\"model_2\":\"B\"") != std::string::npos);
  CHECK(lines[5].find("\"model_1\":\"B\"") != std::string::npos);
  CHECK(lines[5].find("\"model_2\":\"C\"") != std::string::npos);

  {
    // Identical rng -> identical prompt sample -> full cache hit.
    ScriptedTransport transport([](const std::string&) -> std::string {
      throw Error(ErrorKind::kEndpointError, "must not be called");
    });
    Rng rng(8);
    auto res = judge_rank(table, config, 2, rng, transport, cache.path);
    CHECK(transport.calls == 0);
    CHECK(res.from_cache == 6);
    CHECK(res.ranking.ranking == Ranking{"A", "B", "C"});
  }

  {
    // Torn final line: only that judgement is re-requested.
    std::string torn = content.substr(0, content.size() - 10);
    std::ofstream(cache.path, std::ios::binary) << torn;
    ScriptedTransport transport(lexicographic_judge);
    Rng rng(8);
    auto res = judge_rank(table, config, 2, rng, transport, cache.path);
    CHECK(transport.calls == 1);
    CHECK(res.from_cache == 5);
    // The repaired cache is whole again.
    auto again = split_lines(read_text_file(cache.path));
    if (!again.empty() && again.back().empty()) again.pop_back();
    CHECK(again.size() == 6);
  }

  {
    // A malformed line that is not a torn tail is corruption.
    std::ofstream(cache.path, std::ios::binary)
        << "{broken}\n" << content;
    ScriptedTransport transport(lexicographic_judge);
    Rng rng(8);
    CHECK_THROWS_AS(judge_rank(table, config, 2, rng, transport, cache.path),
                    Error);
  }
}

TEST_CASE("endpoint failure aborts but keeps the finished prefix") {
  auto table = graded_table();
  CacheFile cache;
  JudgeEndpointConfig config;
  config.max_in_flight = 1;  // deterministic failure point

  std::atomic<int> served{0};
  ScriptedTransport transport([&](const std::string& prompt) -> std::string {
    if (++served > 3) throw Error(ErrorKind::kEndpointError, "down");
    return lexicographic_judge(prompt);
  });
  Rng rng(8);
  CHECK_THROWS_AS(judge_rank(table, config, 2, rng, transport, cache.path),
                  Error);

  auto lines = split_lines(read_text_file(cache.path));
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  CHECK(lines.size() == 3);

  // The retry completes the remaining judgements from the prefix.
  ScriptedTransport transport2(lexicographic_judge);
  Rng rng2(8);
  auto res = judge_rank(table, config, 2, rng2, transport2, cache.path);
  CHECK(res.from_cache == 3);
  CHECK(transport2.calls == 3);
  CHECK(res.ranking.ranking == Ranking{"A", "B", "C"});
}

TEST_CASE("judge_rank validates inputs") {
  auto table = graded_table();
  ScriptedTransport transport(lexicographic_judge);
  JudgeEndpointConfig config;
  Rng rng(1);
  CHECK_THROWS_AS(judge_rank(table, config, 0, rng, transport), Error);
  CHECK_THROWS_AS(judge_rank(table, config, 3, rng, transport), Error);

  ResponseTable lone;
  lone.add_model("only");
  lone.add_prompt("p");
  lone.set("only", "p", "x");
  CHECK_THROWS_AS(judge_rank(lone, config, 1, rng, transport), Error);
}

TEST_CASE("prompt_texts replaces the instruction body") {
  auto table = graded_table();
  std::map<PromptId, std::string> texts{{"p0", "What is up?"},
                                        {"p1", "What is down?"}};
  std::string seen;
  ScriptedTransport transport([&](const std::string& prompt) {
    seen += between(prompt, "###Instruction:\n", "\n###Response 1:") + ";";
    return lexicographic_judge(prompt);
  });
  JudgeEndpointConfig config;
  config.max_in_flight = 1;
  Rng rng(2);
  (void)judge_rank(table, config, 2, rng, transport, "", &texts);
  CHECK(seen.find("What is up?") != std::string::npos);
  CHECK(seen.find("What is down?") != std::string::npos);
  CHECK(seen.find("p0") == std::string::npos);  // ids no longer leak through
}

TEST_CASE("http transport round-trips against a local server") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string auth_seen;
  server.Post("/v1/complete", [&](const httplib::Request& req,
                                  httplib::Response& res) {
    ++hits;
    auth_seen = req.get_header_value("Authorization");
    auto body = nlohmann::json::parse(req.body);
    std::string text = "echo:" + body["prompt"].get<std::string>();
    nlohmann::json reply = {
        {"choices", {{{"text", text}}}},
    };
    res.set_content(reply.dump(), "application/json");
  });
  server.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
    if (++hits < 3) {
      res.status = 500;
      return;
    }
    res.set_content("{\"text\":\"ok [RESULT] 2\"}", "application/json");
  });

  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread runner([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  {
    JudgeEndpointConfig config;
    config.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/complete";
    config.token = "sesame";
    config.response_field = "choices.0.text";
    HttpJudgeTransport transport(config);
    CHECK(transport.complete("ping") == "echo:ping");
    CHECK(auth_seen == "Bearer sesame");
  }
  {
    hits = 0;
    JudgeEndpointConfig config;
    config.url = "http://127.0.0.1:" + std::to_string(port) + "/flaky";
    HttpJudgeTransport transport(config);
    CHECK(transport.complete("x") == "ok [RESULT] 2");  // after two retries
    CHECK(hits == 3);
  }
  {
    JudgeEndpointConfig config;
    config.url = "http://127.0.0.1:" + std::to_string(port) + "/nowhere";
    config.max_retries = 1;
    HttpJudgeTransport transport(config);
    CHECK_THROWS_AS(transport.complete("x"), Error);
  }

  server.stop();
  runner.join();
}
