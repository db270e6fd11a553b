#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "trirank/core.hpp"

namespace trirank {

// Rank-biased overlap between two full rankings of the same model set.
// Exact closed form for conjoint lists: with A_d the top-d agreement,
// (1-p) * sum_{d=1}^{n-1} p^(d-1) A_d + p^(n-1), since A_d = 1 for d >= n.
double rbo(const Ranking& a, const Ranking& b, double p = 0.95);

// Average precision at k with the relevant set fixed to truth's top k and
// the sum normalized by k. k is clamped to the list length.
double map_at_k(const Ranking& estimated, const Ranking& truth, std::size_t k);

struct RankQuality {
  double rbo = 0.0;
  std::map<std::size_t, double> map_at;  // k -> AP@k
};

RankQuality rank_quality(const Ranking& estimated, const Ranking& truth,
                         const std::vector<std::size_t>& ks,
                         double p = 0.95);

}  // namespace trirank
