#pragma once

#include <cstdint>
#include <vector>

#include "trirank/core.hpp"
#include "trirank/rng.hpp"
#include "trirank/scorers.hpp"
#include "trirank/triplet.hpp"

namespace trirank {

// Ranking plus the score that ordered it, aligned entry by entry. Scores may
// be empty for procedures that produce no per-model number.
struct ScoredRanking {
  Ranking ranking;
  std::vector<double> scores;
};

struct GtrEvent {
  enum class Kind { kVote, kCoin, kPairResolve, kAppendSingle };
  Kind kind;
  std::vector<ModelId> models;  // triplet / pair / single, in play order
  ModelId removed;              // vote: ejected; coin & pair: placed second
  bool consensus = false;       // vote only: false means tie ejection
};

struct GtrTrace {
  std::vector<GtrEvent> events;
  std::uint64_t votes = 0;
  std::uint64_t pair_resolutions = 0;
  std::uint64_t evaluations = 0;  // pairwise verdicts: 3*votes + resolutions
};

struct GtrResult {
  Ranking ranking;
  GtrTrace trace;
};

// Greedy triplet ranking. Repeatedly evaluates a rolling triplet, relegates
// the consensus-worst model (no consensus ejects the most recently added),
// keeps the two survivors of each sweep, orders the first surviving pair by
// one fair-coin draw from rng, and resolves every later pair with the overall
// best model as judge.
GtrResult gtr(const ResponseTable& table, const ScorerSpec& scorer, Rng& rng);

struct FtrResult {
  Ranking ranking;
  std::vector<ModelId> models;     // input order
  std::vector<double> reputation;  // aligned with models
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> delta_log;   // one delta per iteration
  std::uint64_t evaluations = 0;   // verdicts spent building the tensor
};

// Full triplet ranking: evaluates every (pair, judge) combination once, then
// iterates reputation-weighted majority votes until the reputation change
// delta falls to epsilon or max_iter is hit. The reported reputation is the
// freshly updated one from the final iteration.
FtrResult ftr(const ResponseTable& table, const ScorerSpec& scorer,
              double epsilon = 1e-6, std::size_t max_iter = 100,
              int workers = 1);

// Same iteration on an already built (for example replayed) tensor.
FtrResult ftr_from_tensor(const TripletTensor& tensor, double epsilon = 1e-6,
                          std::size_t max_iter = 100);

// Most-common-answer baseline for single-token answers: the modal trimmed
// response per prompt (lexicographic tie-break) acts as pseudo-truth and
// models are ranked by agreement with it. `agreement` replaces plain string
// equality in the agreement step when given; the mode is always computed on
// the trimmed strings.
ScoredRanking mca_multiple_choice(const ResponseTable& table,
                                  Scorer* agreement = nullptr);

// Most-common-answer baseline for free text: per prompt, the top_k pooled
// bigrams (count desc, then key) across all models form a pseudo-reference
// multiset, and each model scores an f-measure against it.
ScoredRanking mca_generative(const ResponseTable& table,
                             std::size_t top_k = 256,
                             BigramMode mode = BigramMode::kWord);

// Reference-based ranking by mean score(reference, response).
ScoredRanking true_ranking(const ResponseTable& table,
                           const ReferenceSet& refs, Scorer& scorer);

// CSV with header rank,model_id,score. Missing scores leave the cell empty.
std::string ranking_csv(const ScoredRanking& r);
std::string ranking_csv(const Ranking& r);

// CSV with header iteration,delta.
std::string delta_csv(const FtrResult& r);

}  // namespace trirank
