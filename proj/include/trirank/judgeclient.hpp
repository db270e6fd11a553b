#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "trirank/core.hpp"
#include "trirank/rankers.hpp"
#include "trirank/rng.hpp"

namespace trirank {

struct JudgeEndpointConfig {
  std::string url;    // full endpoint, e.g. http://host:port/v1/complete
  std::string token;  // sent as a bearer token when non-empty
  std::string response_field = "text";  // dot path into the reply JSON
  double temperature = 0.0;
  int max_tokens = 512;
  double timeout_s = 60.0;
  int max_retries = 3;
  int max_in_flight = 4;
  std::string rubric = "Which is the better response?";
};

// Fills the pairwise judging template. The wording, line breaks and trailing
// spaces are kept exactly as the judge was prompted with, so rendered output
// is byte-stable.
std::string render_prompt(const std::string& instruction,
                          const std::string& response_1,
                          const std::string& response_2,
                          const std::string& rubric);

// 1 or 2 from the last "[RESULT]" marker; 0 when no marker follows with a
// first integer of 1 or 2.
int parse_verdict(const std::string& output);

struct PairJudgement {
  PromptId prompt_id;
  ModelId model_1;  // presented as Response 1
  ModelId model_2;
  int verdict = 0;  // 1, 2, or 0 = unparseable
  std::string feedback;
};

// One completion request; implementations may block. Thrown Errors of kind
// EndpointError abort the run (after the transport's own retries).
class JudgeTransport {
 public:
  virtual ~JudgeTransport() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

// POSTs {"prompt", "temperature", "max_tokens"} to the configured URL and
// extracts the completion text via the response_field path.
class HttpJudgeTransport final : public JudgeTransport {
 public:
  explicit HttpJudgeTransport(const JudgeEndpointConfig& config);
  std::string complete(const std::string& prompt) override;

 private:
  JudgeEndpointConfig config_;
  std::string host_;  // scheme://host[:port]
  std::string path_;
};

struct JudgeRankResult {
  ScoredRanking ranking;                  // win rates, descending
  std::vector<PairJudgement> judgements;  // canonical (pair, prompt) order
  std::size_t unparseable = 0;
  std::size_t from_cache = 0;
};

// Judges every unordered model pair on sample_size prompts drawn without
// replacement, the lower-index model always presented as Response 1, and
// ranks models by win rate (unparseable verdicts drop out of both counts).
// Requests run with at most max_in_flight in flight; judgements commit to
// cache_path (JSONL, resumable) in canonical order, and cached entries are
// never re-requested. prompt_texts supplies instruction text per prompt;
// without it the prompt id is used.
JudgeRankResult judge_rank(
    const ResponseTable& table, const JudgeEndpointConfig& config,
    std::size_t sample_size, Rng& rng, JudgeTransport& transport,
    const std::string& cache_path = "",
    const std::map<PromptId, std::string>* prompt_texts = nullptr);

}  // namespace trirank
