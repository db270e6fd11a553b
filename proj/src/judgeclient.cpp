#include "trirank/judgeclient.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "trirank/io_util.hpp"

namespace trirank {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kTemplate =
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
    "{instruction}\n"
    "###Response 1:\n"
    "{response_1}\n"
    "###Response 2:\n"
    "{response_2}\n"
    "###Score Rubric:\n"
    "{rubric}\n"
    "###Feedback: \n";

void substitute(std::string& text, std::string_view slot,
                const std::string& value) {
  std::size_t pos = text.find(slot);
  if (pos != std::string::npos) text.replace(pos, slot.size(), value);
}

}  // namespace

std::string render_prompt(const std::string& instruction,
                          const std::string& response_1,
                          const std::string& response_2,
                          const std::string& rubric) {
  std::string out = kTemplate;
  substitute(out, "{instruction}", instruction);
  substitute(out, "{response_1}", response_1);
  substitute(out, "{response_2}", response_2);
  substitute(out, "{rubric}", rubric);
  return out;
}

int parse_verdict(const std::string& output) {
  std::size_t pos = output.rfind("[RESULT]");
  if (pos == std::string::npos) return 0;
  std::size_t i = pos + 8;
  while (i < output.size() && !std::isdigit(static_cast<unsigned char>(output[i])))
    ++i;
  if (i >= output.size()) return 0;
  std::size_t end = i;
  while (end < output.size() &&
         std::isdigit(static_cast<unsigned char>(output[end])))
    ++end;
  std::string digits = output.substr(i, end - i);
  if (digits == "1") return 1;
  if (digits == "2") return 2;
  return 0;
}

HttpJudgeTransport::HttpJudgeTransport(const JudgeEndpointConfig& config)
    : config_(config) {
  if (config.url.empty())
    throw Error(ErrorKind::kInvalidParams, "judge endpoint URL is empty");
  std::size_t scheme = config.url.find("://");
  std::size_t path_start = scheme == std::string::npos
                               ? config.url.find('/')
                               : config.url.find('/', scheme + 3);
  if (path_start == std::string::npos) {
    host_ = config.url;
    path_ = "/";
  } else {
    host_ = config.url.substr(0, path_start);
    path_ = config.url.substr(path_start);
  }
}

std::string HttpJudgeTransport::complete(const std::string& prompt) {
  ordered_json body;
  body["prompt"] = prompt;
  body["temperature"] = config_.temperature;
  body["max_tokens"] = config_.max_tokens;
  std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    httplib::Client client(host_);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
    if (!config_.token.empty()) client.set_bearer_token_auth(config_.token);

    auto res = client.Post(path_, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) {
      last_error = "reply is not JSON";
      continue;
    }
    // Walk the dot path; numeric components index arrays.
    const json* node = &reply;
    std::string field = config_.response_field;
    std::size_t start = 0;
    bool ok = true;
    while (start <= field.size()) {
      std::size_t dot = field.find('.', start);
      std::string part = field.substr(
          start, dot == std::string::npos ? std::string::npos : dot - start);
      if (node->is_array() && !part.empty() &&
          part.find_first_not_of("0123456789") == std::string::npos) {
        std::size_t idx = std::stoul(part);
        if (idx >= node->size()) {
          ok = false;
          break;
        }
        node = &(*node)[idx];
      } else if (node->is_object() && node->contains(part)) {
        node = &(*node)[part];
      } else {
        ok = false;
        break;
      }
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    if (!ok || !node->is_string()) {
      last_error = "reply missing field " + config_.response_field;
      continue;
    }
    return node->get<std::string>();
  }
  throw Error(ErrorKind::kEndpointError,
              "judge endpoint failed after " +
                  std::to_string(config_.max_retries + 1) + " attempts: " +
                  last_error);
}

namespace {

struct JudgeTask {
  std::size_t pair_a, pair_b;  // model indices, a < b
  PromptId prompt;
};

std::string cache_key(const ModelId& m1, const ModelId& m2,
                      const PromptId& prompt) {
  return m1 + "\x1f" + m2 + "\x1f" + prompt;
}

std::string judgement_line(const PairJudgement& j) {
  ordered_json rec;
  rec["prompt_id"] = j.prompt_id;
  rec["model_1"] = j.model_1;
  rec["model_2"] = j.model_2;
  rec["verdict"] = j.verdict;
  rec["feedback"] = j.feedback;
  return rec.dump();
}

// clean_bytes receives the length of the parseable prefix; a torn final line
// (interrupted mid-write, no trailing newline) is excluded so the caller can
// truncate it away before appending.
std::map<std::string, PairJudgement> load_cache(const std::string& path,
                                                std::uintmax_t* clean_bytes) {
  std::map<std::string, PairJudgement> cache;
  *clean_bytes = 0;
  if (path.empty() || !std::filesystem::exists(path)) return cache;
  std::string content = read_text_file(path);
  *clean_bytes = content.size();
  bool ends_clean = content.empty() || content.back() == '\n';
  auto lines = split_lines(content);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    json j = json::parse(lines[ln], nullptr, false);
    bool bad = j.is_discarded() || !j.is_object() || !j.contains("prompt_id") ||
               !j.contains("model_1") || !j.contains("model_2") ||
               !j.contains("verdict") || !j.contains("feedback");
    if (bad) {
      // A torn final line from an interrupted run is recoverable; anything
      // else is a corrupt cache.
      if (ln + 1 == lines.size() && !ends_clean) {
        *clean_bytes = content.size() - lines[ln].size();
        break;
      }
      throw Error(ErrorKind::kParseError,
                  "judge cache line " + std::to_string(ln + 1) + " malformed");
    }
    PairJudgement rec{j["prompt_id"].get<std::string>(),
                      j["model_1"].get<std::string>(),
                      j["model_2"].get<std::string>(), j["verdict"].get<int>(),
                      j["feedback"].get<std::string>()};
    cache[cache_key(rec.model_1, rec.model_2, rec.prompt_id)] = rec;
  }
  return cache;
}

}  // namespace

JudgeRankResult judge_rank(const ResponseTable& table,
                           const JudgeEndpointConfig& config,
                           std::size_t sample_size, Rng& rng,
                           JudgeTransport& transport,
                           const std::string& cache_path,
                           const std::map<PromptId, std::string>* prompt_texts) {
  require_valid(table);
  std::size_t n = table.n_models();
  if (n < 2) throw Error(ErrorKind::kTooFewModels, "need at least 2 models");
  if (sample_size < 1 || sample_size > table.n_prompts())
    throw Error(ErrorKind::kInvalidParams,
                "sample_size must lie in [1, prompt count]");

  // Prompt sample without replacement, in draw order.
  std::vector<std::size_t> prompt_idx(table.n_prompts());
  std::iota(prompt_idx.begin(), prompt_idx.end(), 0);
  std::vector<PromptId> sampled;
  for (std::size_t t = 0; t < sample_size; ++t) {
    std::size_t pick = t + rng.below(prompt_idx.size() - t);
    std::swap(prompt_idx[t], prompt_idx[pick]);
    sampled.push_back(table.prompts()[prompt_idx[t]]);
  }

  // Canonical task order: pairs by index, then prompts in draw order.
  std::vector<JudgeTask> tasks;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (const auto& p : sampled) tasks.push_back({a, b, p});

  std::uintmax_t clean_bytes = 0;
  auto cache = load_cache(cache_path, &clean_bytes);
  if (!cache_path.empty() && std::filesystem::exists(cache_path) &&
      std::filesystem::file_size(cache_path) > clean_bytes)
    std::filesystem::resize_file(cache_path, clean_bytes);
  JudgeRankResult result;
  result.judgements.resize(tasks.size());

  std::vector<char> done(tasks.size(), 0);
  std::vector<char> was_cached(tasks.size(), 0);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const JudgeTask& task = tasks[t];
    auto it = cache.find(cache_key(table.models()[task.pair_a],
                                   table.models()[task.pair_b], task.prompt));
    if (it != cache.end()) {
      result.judgements[t] = it->second;
      done[t] = 1;
      was_cached[t] = 1;
      ++result.from_cache;
    }
  }

  std::ofstream cache_out;
  if (!cache_path.empty()) {
    cache_out.open(cache_path, std::ios::app | std::ios::binary);
    if (!cache_out)
      throw Error(ErrorKind::kIoError, "cannot write " + cache_path);
  }

  std::mutex mu;
  std::size_t next_task = 0;
  std::size_t committed = 0;
  bool failed = false;
  std::string failure;

  // Results append to the cache strictly in task order, so a cold run
  // produces a canonical file and an interrupted one a clean prefix.
  auto commit_ready = [&]() {
    while (committed < tasks.size() && done[committed]) {
      if (cache_out.is_open() && !was_cached[committed])
        cache_out << judgement_line(result.judgements[committed]) << "\n"
                  << std::flush;
      ++committed;
    }
  };

  int workers = config.max_in_flight < 1 ? 1 : config.max_in_flight;
  auto work = [&]() {
    for (;;) {
      std::size_t t;
      {
        std::unique_lock<std::mutex> lock(mu);
        while (next_task < tasks.size() && done[next_task]) ++next_task;
        if (failed || next_task >= tasks.size()) return;
        t = next_task++;
      }
      const JudgeTask& task = tasks[t];
      PairJudgement rec;
      rec.prompt_id = task.prompt;
      rec.model_1 = table.models()[task.pair_a];
      rec.model_2 = table.models()[task.pair_b];
      std::string error;
      try {
        std::string instruction = task.prompt;
        if (prompt_texts) {
          auto it = prompt_texts->find(task.prompt);
          if (it != prompt_texts->end()) instruction = it->second;
        }
        std::string prompt = render_prompt(
            instruction, table.response(rec.model_1, task.prompt),
            table.response(rec.model_2, task.prompt), config.rubric);
        rec.feedback = transport.complete(prompt);
        rec.verdict = parse_verdict(rec.feedback);
      } catch (const Error& e) {
        error = e.what();
      }
      {
        std::unique_lock<std::mutex> lock(mu);
        if (!error.empty()) {
          if (!failed) {
            failed = true;
            failure = error;
          }
        } else {
          result.judgements[t] = std::move(rec);
          done[t] = 1;
          commit_ready();
        }
      }
    }
  };

  {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  {
    std::unique_lock<std::mutex> lock(mu);
    commit_ready();
  }
  if (cache_out.is_open()) cache_out.close();
  if (failed) throw Error(ErrorKind::kEndpointError, failure);

  // Win rates over parseable verdicts only.
  std::vector<double> wins(n, 0.0);
  std::vector<double> judged(n, 0.0);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const JudgeTask& task = tasks[t];
    int v = result.judgements[t].verdict;
    if (v == 0) {
      ++result.unparseable;
      continue;
    }
    judged[task.pair_a] += 1.0;
    judged[task.pair_b] += 1.0;
    wins[v == 1 ? task.pair_a : task.pair_b] += 1.0;
  }
  std::vector<double> rate(n, 0.0);
  for (std::size_t m = 0; m < n; ++m)
    rate[m] = judged[m] > 0.0 ? wins[m] / judged[m] : 0.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rate[a] > rate[b];
  });
  for (std::size_t m : order) {
    result.ranking.ranking.push_back(table.models()[m]);
    result.ranking.scores.push_back(rate[m]);
  }
  return result;
}

}  // namespace trirank
