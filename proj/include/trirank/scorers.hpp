#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trirank/core.hpp"
#include "trirank/rng.hpp"

namespace trirank {

enum class BigramMode { kWord, kCharacter };

// Bigram multiset as key -> count. Word mode lowercases, strips punctuation
// and splits on whitespace (including the common Unicode space code points)
// before pairing adjacent tokens; character mode pairs adjacent bytes of the
// raw string. Fewer than two units yields an empty multiset.
std::map<std::string, int> bigrams(std::string_view text, BigramMode mode);

// ROUGE-2 f-measure between candidate and reference bigram multisets.
// Zero when either multiset is empty or they share nothing.
double rouge2_f(std::string_view candidate, std::string_view reference,
                BigramMode mode);

// 1 iff the two strings are equal after trimming surrounding whitespace.
int exact_match(std::string_view a, std::string_view b);

// exact_match whose result is flipped with probability flip_p. Consumes
// exactly one draw from rng per call, hit or not, so streams stay aligned.
int noisy_match(std::string_view a, std::string_view b, double flip_p,
                Rng& rng);

std::string_view trim_ws(std::string_view s);

// Per-cell precomputation so repeated comparisons against the same response
// do not re-tokenize it.
struct PreparedText {
  std::string trimmed;                                  // exact family
  std::vector<std::pair<std::string, int>> bigram_seq;  // sorted by key
  long long bigram_total = 0;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual PreparedText prepare(std::string_view text) const = 0;
  virtual double score(const PreparedText& a, const PreparedText& b) = 0;
  double score_text(std::string_view a, std::string_view b) {
    return score(prepare(a), prepare(b));
  }
};

// Parsed scorer configuration. `seed` matters only for the noisy scorer;
// instance(stream) seeds each instance with Rng::derive(seed, stream) so
// parallel evaluations can use disjoint, schedule-independent streams.
struct ScorerSpec {
  enum class Kind { kRouge2Word, kRouge2Char, kExact, kNoisyExact };

  Kind kind = Kind::kRouge2Word;
  double p = 0.0;
  Seed seed = 0;

  // Accepts "rouge2-word", "rouge2-char", "exact", "noisy-exact:p=<float>".
  static ScorerSpec parse(std::string_view name, Seed seed = 0);

  std::string name() const;
  bool stochastic() const { return kind == Kind::kNoisyExact; }
  std::unique_ptr<Scorer> instance(std::uint64_t stream = 0) const;
};

}  // namespace trirank
