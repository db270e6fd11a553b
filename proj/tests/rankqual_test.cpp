#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "trirank/rankqual.hpp"

using namespace trirank;

namespace {

// Straightforward definitional implementations, kept independent of the
// incremental versions in the library.
double rbo_oracle(const Ranking& a, const Ranking& b, double p) {
  std::size_t n = a.size();
  double sum = 0.0;
  for (std::size_t d = 1; d + 1 <= n; ++d) {
    std::set<ModelId> ta(a.begin(), a.begin() + d);
    std::set<ModelId> tb(b.begin(), b.begin() + d);
    std::size_t inter = 0;
    for (const auto& m : ta) inter += tb.count(m);
    sum += std::pow(p, double(d - 1)) * double(inter) / double(d);
  }
  return (1.0 - p) * sum + std::pow(p, double(n - 1));
}

double map_oracle(const Ranking& est, const Ranking& truth, std::size_t k) {
  k = std::min(k, truth.size());
  std::set<ModelId> rel(truth.begin(), truth.begin() + k);
  double ap = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    if (!rel.count(est[i - 1])) continue;
    std::size_t inter = 0;
    for (std::size_t j = 0; j < i; ++j) inter += rel.count(est[j]);
    ap += double(inter) / double(i);
  }
  return ap / double(k);
}

std::vector<ModelId> ids(std::size_t n) {
  std::vector<ModelId> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(std::string(1, char('a' + i)));
  return v;
}

}  // namespace

TEST_CASE("rbo frozen examples") {
  CHECK(rbo({"a", "b", "c"}, {"a", "b", "c"}) == 1.0);
  CHECK(rbo({"a", "b"}, {"b", "a"}, 0.95) == doctest::Approx(0.95).epsilon(1e-12));
  // (1-p)*(0 + p*(1/2)) + p^2 with p = 0.95
  CHECK(rbo({"a", "b", "c"}, {"c", "b", "a"}, 0.95) ==
        doctest::Approx(0.92625).epsilon(1e-12));
  CHECK(rbo({"a"}, {"a"}, 0.5) == 1.0);
}

TEST_CASE("rbo validates inputs") {
  CHECK_THROWS_AS(rbo({"a", "b"}, {"a", "c"}), Error);
  CHECK_THROWS_AS(rbo({"a", "a"}, {"a", "a"}), Error);
  CHECK_THROWS_AS(rbo({"a", "b"}, {"a"}), Error);
  CHECK_THROWS_AS(rbo({"a", "b"}, {"b", "a"}, 0.0), Error);
  CHECK_THROWS_AS(rbo({"a", "b"}, {"b", "a"}, 1.0), Error);
  try {
    rbo({"a", "b"}, {"b", "a"}, 1.5);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::kInvalidProbability);
  }
}

TEST_CASE("map_at_k frozen examples") {
  CHECK(map_at_k({"a", "b", "c", "d", "e"}, {"a", "b", "c", "d", "e"}, 5) ==
        1.0);
  // relevant {a,b}; estimated front holds both -> perfect
  CHECK(map_at_k({"b", "a", "d", "c"}, {"a", "b", "c", "d"}, 2) == 1.0);
  // nothing relevant inside the window
  CHECK(map_at_k({"c", "d", "a", "b"}, {"a", "b", "c", "d"}, 2) == 0.0);
  // k larger than n clamps
  CHECK(map_at_k({"a", "b"}, {"a", "b"}, 10) == 1.0);
  CHECK_THROWS_AS(map_at_k({"a"}, {"a"}, 0), Error);
}

TEST_CASE("both metrics match the oracle on every permutation pair, n <= 4") {
  for (std::size_t n = 1; n <= 4; ++n) {
    auto base = ids(n);
    auto a = base;
    std::sort(a.begin(), a.end());
    do {
      auto b = base;
      do {
        CHECK(rbo(a, b, 0.95) ==
              doctest::Approx(rbo_oracle(a, b, 0.95)).epsilon(1e-13));
        CHECK(rbo(a, b, 0.5) ==
              doctest::Approx(rbo_oracle(a, b, 0.5)).epsilon(1e-13));
        for (std::size_t k = 1; k <= n; ++k)
          CHECK(map_at_k(a, b, k) ==
                doctest::Approx(map_oracle(a, b, k)).epsilon(1e-13));
      } while (std::next_permutation(b.begin(), b.end()));
    } while (std::next_permutation(a.begin(), a.end()));
  }
}

TEST_CASE("rbo symmetry and bounds on random-ish permutations") {
  auto a = ids(6);
  auto b = a;
  std::rotate(b.begin(), b.begin() + 3, b.end());
  CHECK(rbo(a, b) == rbo(b, a));
  double v = rbo(a, b);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
}

TEST_CASE("rank_quality bundles rbo and map") {
  auto q = rank_quality({"a", "b", "c"}, {"a", "c", "b"}, {1, 3}, 0.95);
  CHECK(q.rbo == doctest::Approx(rbo({"a", "b", "c"}, {"a", "c", "b"})));
  CHECK(q.map_at.at(1) == 1.0);
  CHECK(q.map_at.at(3) == doctest::Approx(map_oracle(
                              {"a", "b", "c"}, {"a", "c", "b"}, 3)));
}
