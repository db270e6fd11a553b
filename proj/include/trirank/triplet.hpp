#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trirank/core.hpp"
#include "trirank/scorers.hpp"

namespace trirank {

// Outcome of one judge comparing two models over every prompt.
struct PairVerdict {
  long long wins_i = 0;
  long long wins_j = 0;
  long long ties = 0;
};

// 1 if i beat j on more prompts, 0 if fewer, 0.5 on an exact tie.
double y_value(const PairVerdict& v);

// Table with every cell run through Scorer::prepare once. Comparisons then
// cost one score() call per prompt instead of re-tokenizing.
class PreparedTable {
 public:
  PreparedTable(const ResponseTable& table, const Scorer& scorer);
  const PreparedText& at(std::size_t model, std::size_t prompt) const {
    return cells_[model * n_prompts_ + prompt];
  }
  std::size_t n_models() const { return n_models_; }
  std::size_t n_prompts() const { return n_prompts_; }

 private:
  std::size_t n_models_;
  std::size_t n_prompts_;
  std::vector<PreparedText> cells_;
};

// For each prompt the judge scores both candidates against its own response;
// the higher similarity wins the prompt, equal similarity is a tie.
PairVerdict pairwise_verdict(const ModelId& judge, const ModelId& i,
                             const ModelId& j, const ResponseTable& table,
                             Scorer& scorer);

// Index-based variant used by the rankers. Scoring order is fixed (prompts in
// table order, candidate i before j) so stochastic scorers are reproducible.
PairVerdict pairwise_verdict_at(const PreparedTable& prepared,
                                std::size_t judge, std::size_t i,
                                std::size_t j, Scorer& scorer);

// Each member of T judges the other two. X is the worst iff both judges
// other than X produce a verdict whose strict loser is X; nullopt otherwise.
// At most one member can satisfy that, since the two verdicts involving X as
// a candidate pin distinct judges.
std::optional<ModelId> worst_of_triplet(const std::array<ModelId, 3>& t,
                                        const ResponseTable& table,
                                        const ScorerSpec& scorer);

// Index variant over a prepared table. The three verdicts (judge t[0], t[1],
// t[2] in that order) use scorer streams stream_base+0..2.
std::optional<std::size_t> worst_of_triplet_at(
    const PreparedTable& prepared, const std::array<std::size_t, 3>& t,
    const ScorerSpec& scorer, std::uint64_t stream_base);

// y values for every (pair, judge) combination of a model set. Stored for
// i < j; the flipped entry is implied by y_jik = 1 - y_ijk.
class TripletTensor {
 public:
  explicit TripletTensor(std::vector<ModelId> models);

  std::size_t n_models() const { return models_.size(); }
  const std::vector<ModelId>& models() const { return models_; }

  void set(std::size_t i, std::size_t j, std::size_t k, double y);
  double y(std::size_t i, std::size_t j, std::size_t k) const;

  std::string to_csv() const;
  static TripletTensor from_csv(const std::string& content);

 private:
  std::size_t slot(std::size_t i, std::size_t j, std::size_t k) const;
  std::vector<ModelId> models_;
  std::vector<double> values_;
};

// Evaluates every unordered pair under every third-party judge, exactly
// n(n-1)(n-2)/2 verdicts. Work may be spread over `workers` threads; each
// evaluation uses a scorer stream derived from its own (pair, judge) index,
// so the tensor does not depend on scheduling. eval_count, when given,
// receives the number of verdicts computed.
TripletTensor build_tensor(const ResponseTable& table, const ScorerSpec& scorer,
                           int workers = 1,
                           std::uint64_t* eval_count = nullptr);

}  // namespace trirank
