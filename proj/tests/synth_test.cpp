#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "trirank/rankers.hpp"
#include "trirank/synth.hpp"

using namespace trirank;

namespace {

SyntheticSpec base_spec() {
  SyntheticSpec s;
  s.n_models = 3;
  s.accuracies = {0.9, 0.6, 0.3};
  s.n_questions = 200;
  s.n_answers = 4;
  s.regime = WrongAnswerRegime::kSharedPool;
  s.seed = 31;
  return s;
}

}  // namespace

TEST_CASE("spec validation") {
  auto s = base_spec();
  CHECK_NOTHROW(s.validate());
  s.n_answers = 1;
  CHECK_THROWS_AS(s.validate(), Error);
  s = base_spec();
  s.accuracies = {0.9, 0.6};
  CHECK_THROWS_AS(s.validate(), Error);
  s = base_spec();
  s.accuracies[1] = 1.2;
  CHECK_THROWS_AS(s.validate(), Error);
  s = base_spec();
  s.n_questions = 0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = base_spec();
  s.n_models = 0;
  s.accuracies = {};
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("generate shapes the table and names things predictably") {
  auto lab = generate(base_spec());
  CHECK(lab.table.models() == std::vector<ModelId>{"M1", "M2", "M3"});
  CHECK(lab.table.n_prompts() == 200);
  CHECK(lab.table.prompts()[0] == "Q0");
  CHECK(lab.table.prompts()[199] == "Q199");
  for (const auto& p : lab.table.prompts()) {
    const auto& t = lab.truth.reference(p);
    CHECK(t.size() == 1);
    CHECK(t >= "0");
    CHECK(t <= "3");
  }
}

TEST_CASE("generate is seed-deterministic and seed-sensitive") {
  auto a = generate(base_spec());
  auto b = generate(base_spec());
  for (const auto& p : a.table.prompts())
    for (const auto& m : a.table.models())
      CHECK(a.table.response(m, p) == b.table.response(m, p));

  auto s = base_spec();
  s.seed = 32;
  auto c = generate(s);
  bool any_diff = false;
  for (const auto& p : a.table.prompts())
    if (a.table.response("M1", p) != c.table.response("M1", p) ||
        a.truth.reference(p) != c.truth.reference(p))
      any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("accuracy realizes near its nominal value") {
  auto s = base_spec();
  s.n_questions = 5000;
  auto lab = generate(s);
  for (std::size_t m = 0; m < 3; ++m) {
    std::size_t hits = 0;
    for (const auto& p : lab.table.prompts())
      if (lab.table.response(lab.table.models()[m], p) ==
          lab.truth.reference(p))
        ++hits;
    double freq = double(hits) / 5000.0;
    CHECK(freq == doctest::Approx(s.accuracies[m]).epsilon(0.05));
  }
}

TEST_CASE("shared pool keeps wrong answers inside the option set") {
  auto s = base_spec();
  s.accuracies = {0.0, 0.0, 0.0};
  auto lab = generate(s);
  for (const auto& p : lab.table.prompts())
    for (const auto& m : lab.table.models()) {
      const auto& r = lab.table.response(m, p);
      CHECK(r.size() == 1);
      CHECK(r != lab.truth.reference(p));  // accuracy 0 never hits truth
    }
}

TEST_CASE("disjoint wrong answers never collide across models") {
  auto s = base_spec();
  s.accuracies = {0.0, 0.0, 0.0};
  s.regime = WrongAnswerRegime::kDisjointPerModel;
  auto lab = generate(s);
  for (const auto& p : lab.table.prompts()) {
    std::set<std::string> seen;
    for (const auto& m : lab.table.models()) {
      const auto& r = lab.table.response(m, p);
      CHECK(seen.insert(r).second);
      CHECK(r != lab.truth.reference(p));
    }
  }
}

TEST_CASE("lemma and theorem condition checkers") {
  CHECK(lemma1_holds(0.9, 0.8, 0.6));   // 0.6 < 0.7
  CHECK_FALSE(lemma1_holds(0.9, 0.8, 0.75));
  CHECK_FALSE(lemma1_holds(0.6, 0.5, 0.2));  // 0.2 >= 0.6 + 0.5 - 1
  CHECK_THROWS_AS(lemma1_holds(0.8, 0.8, 0.5), Error);
  CHECK_THROWS_AS(lemma1_holds(0.5, 0.8, 0.2), Error);
  CHECK_THROWS_AS(lemma1_holds(1.2, 0.8, 0.2), Error);

  CHECK(thm1_holds(0.9, 0.8, 0.6, 0.05));  // 0.6 < 0.65
  CHECK_FALSE(thm1_holds(0.9, 0.8, 0.6, 0.2));
  CHECK_THROWS_AS(thm1_holds(0.9, 0.8, 0.6, -0.1), Error);
  CHECK_THROWS_AS(thm1_holds(0.9, 0.8, 0.6, 1.1), Error);
}

TEST_CASE("overlap measurement") {
  ResponseTable t;
  t.add_model("A");
  t.add_model("B");
  for (const char* p : {"p0", "p1", "p2", "p3"}) t.add_prompt(p);
  ReferenceSet truth;
  for (const char* p : {"p0", "p1", "p2", "p3"}) truth.set(p, "gold");
  t.set("A", "p0", "gold");   // A right
  t.set("B", "p0", "x");
  t.set("A", "p1", "x");      // both wrong, same
  t.set("B", "p1", "x");
  t.set("A", "p2", "x");      // both wrong, different
  t.set("B", "p2", "y");
  t.set("A", "p3", "gold");   // both right
  t.set("B", "p3", "gold");
  CHECK(measure_overlap_m(t, truth, "A", "B") == doctest::Approx(0.25));
  CHECK(measure_overlap_m(t, truth, "B", "A") == doctest::Approx(0.25));
  CHECK_THROWS_AS(measure_overlap_m(t, truth, "A", "A"), Error);
}

TEST_CASE("shared pool overlap sits near its closed form") {
  // Two models at accuracy 0.5 over 2 options: both wrong on 1/4 of prompts
  // and the single wrong option always coincides.
  SyntheticSpec s;
  s.n_models = 2;
  s.accuracies = {0.5, 0.5};
  s.n_questions = 20000;
  s.n_answers = 2;
  s.regime = WrongAnswerRegime::kSharedPool;
  s.seed = 77;
  auto lab = generate(s);
  double m = measure_overlap_m(lab.table, lab.truth, "M1", "M2");
  CHECK(m == doctest::Approx(0.25).epsilon(0.05));

  s.regime = WrongAnswerRegime::kDisjointPerModel;
  auto lab2 = generate(s);
  CHECK(measure_overlap_m(lab2.table, lab2.truth, "M1", "M2") == 0.0);
}

TEST_CASE("accuracy ladder spans best down to best over nine") {
  auto v = accuracy_ladder(0.9, 5);
  REQUIRE(v.size() == 5);
  CHECK(v[0] == doctest::Approx(0.9));
  CHECK(v[4] == doctest::Approx(0.1));
  CHECK(v[1] == doctest::Approx(0.7));
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] < v[i - 1]);
  auto one = accuracy_ladder(0.5, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(accuracy_ladder(1.5, 3), Error);
  CHECK_THROWS_AS(accuracy_ladder(0.9, 0), Error);
}

TEST_CASE("ftr separates a lemma-satisfying synthetic instance") {
  SyntheticSpec s;
  s.n_models = 3;
  s.accuracies = {0.95, 0.8, 0.3};
  s.n_questions = 400;
  s.n_answers = 8;
  s.regime = WrongAnswerRegime::kDisjointPerModel;
  s.seed = 5;
  auto lab = generate(s);
  auto res = ftr(lab.table, ScorerSpec::parse("exact"));
  CHECK(res.ranking == Ranking{"M1", "M2", "M3"});
}
