#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "trirank/rng.hpp"

using namespace trirank;

TEST_CASE("rng is reproducible for equal seeds") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("next_double stays in [0,1)") {
  Rng r(7);
  for (int i = 0; i < 10000; ++i) {
    double x = r.next_double();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("below produces every residue and respects the bound") {
  Rng r(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    auto v = r.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("shuffle permutes and is seed-stable") {
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Rng r(99);
  r.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});

  std::vector<int> w{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Rng r2(99);
  r2.shuffle(w);
  CHECK(v == w);
}

TEST_CASE("derived streams differ from each other and the master") {
  Seed master = 1234;
  Seed s0 = Rng::derive(master, 0);
  Seed s1 = Rng::derive(master, 1);
  CHECK(s0 != s1);
  CHECK(s0 != master);
  CHECK(Rng::derive(master, 0) == s0);  // pure function
}

TEST_CASE("fnv1a64 matches reference digests") {
  // Standard FNV-1a test vectors.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
