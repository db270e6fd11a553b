#include "trirank/rankqual.hpp"

#include <algorithm>
#include <cmath>

namespace trirank {
namespace {

std::map<ModelId, std::size_t> positions(const Ranking& r) {
  std::map<ModelId, std::size_t> pos;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!pos.emplace(r[i], i).second)
      throw Error(ErrorKind::kNotConjoint, "ranking repeats " + r[i]);
  return pos;
}

void require_conjoint(const Ranking& a, const Ranking& b,
                      const std::map<ModelId, std::size_t>& pos_b) {
  if (a.empty())
    throw Error(ErrorKind::kInvalidParams, "empty ranking");
  if (a.size() != b.size())
    throw Error(ErrorKind::kNotConjoint, "rankings differ in length");
  for (const auto& m : a)
    if (pos_b.count(m) == 0)
      throw Error(ErrorKind::kNotConjoint, "rankings differ as sets: " + m);
}

}  // namespace

double rbo(const Ranking& a, const Ranking& b, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorKind::kInvalidProbability, "p must lie in (0,1)");
  auto pos_a = positions(a);
  auto pos_b = positions(b);
  require_conjoint(a, b, pos_b);
  require_conjoint(b, a, pos_a);

  std::size_t n = a.size();
  double sum = 0.0;
  double pow_p = 1.0;  // p^(d-1)
  std::size_t overlap = 0;
  for (std::size_t d = 1; d < n; ++d) {
    const ModelId& x = a[d - 1];
    const ModelId& y = b[d - 1];
    if (x == y) {
      overlap += 1;
    } else {
      if (pos_b[x] <= d - 1) ++overlap;
      if (pos_a[y] <= d - 1) ++overlap;
    }
    sum += pow_p * static_cast<double>(overlap) / static_cast<double>(d);
    pow_p *= p;
  }
  // pow_p is now p^(n-1); the agreement is 1 from depth n onward.
  return (1.0 - p) * sum + pow_p;
}

double map_at_k(const Ranking& estimated, const Ranking& truth,
                std::size_t k) {
  if (k < 1) throw Error(ErrorKind::kInvalidParams, "k must be at least 1");
  auto pos_t = positions(truth);
  auto pos_e = positions(estimated);
  require_conjoint(estimated, truth, pos_t);
  require_conjoint(truth, estimated, pos_e);

  std::size_t n = truth.size();
  k = std::min(k, n);
  double ap = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 1; i <= k; ++i) {
    bool relevant = pos_t[estimated[i - 1]] < k;
    if (relevant) {
      ++hits;
      ap += static_cast<double>(hits) / static_cast<double>(i);
    }
  }
  return ap / static_cast<double>(k);
}

RankQuality rank_quality(const Ranking& estimated, const Ranking& truth,
                         const std::vector<std::size_t>& ks, double p) {
  RankQuality q;
  q.rbo = rbo(estimated, truth, p);
  for (std::size_t k : ks) q.map_at[k] = map_at_k(estimated, truth, k);
  return q;
}

}  // namespace trirank
