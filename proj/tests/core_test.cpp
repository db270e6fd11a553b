#include <doctest.h>

#include "trirank/core.hpp"

using namespace trirank;

namespace {

ResponseTable small_table() {
  ResponseTable t;
  for (const char* m : {"a", "b", "c"}) t.add_model(m);
  for (const char* p : {"p0", "p1"}) t.add_prompt(p);
  for (const auto& m : t.models())
    for (const auto& p : t.prompts()) t.set(m, p, m + ":" + p);
  return t;
}

}  // namespace

TEST_CASE("table preserves insertion order") {
  auto t = small_table();
  CHECK(t.models() == std::vector<ModelId>{"a", "b", "c"});
  CHECK(t.prompts() == std::vector<PromptId>{"p0", "p1"});
  CHECK(t.response("b", "p1") == "b:p1");
}

TEST_CASE("validation reports structural problems") {
  ResponseTable t;
  auto v0 = validate_table(t);
  CHECK_FALSE(v0.ok());
  CHECK(v0.empty_model_set);
  CHECK(v0.empty_prompt_set);

  t.add_model("a");
  t.add_model("a");
  t.add_prompt("p");
  auto v1 = validate_table(t);
  CHECK(v1.duplicate_models == std::vector<ModelId>{"a"});
  CHECK_FALSE(v1.ok());

  ResponseTable u;
  u.add_model("m");
  u.add_prompt("p");
  auto v2 = validate_table(u);
  CHECK(v2.missing_cells.size() == 1);
  u.set("m", "p", "x");
  CHECK(validate_table(u).ok());
  CHECK_NOTHROW(require_valid(u));
}

TEST_CASE("require_valid throws with the right kind") {
  ResponseTable t;
  CHECK_THROWS_AS(require_valid(t), Error);
  try {
    require_valid(t);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::kEmptyModelSet);
  }
}

TEST_CASE("unknown ids are rejected") {
  auto t = small_table();
  CHECK_THROWS_AS((void)t.response("zz", "p0"), Error);
  CHECK_THROWS_AS((void)t.response("a", "zz"), Error);
  CHECK_THROWS_AS(t.set("zz", "p0", "x"), Error);
}

TEST_CASE("subset keeps table order and checks ids") {
  auto t = small_table();
  auto s = subset_models(t, {"c", "a"});
  CHECK(s.models() == std::vector<ModelId>{"c", "a"});
  CHECK(s.response("c", "p0") == "c:p0");
  CHECK_THROWS_AS(subset_models(t, {"a", "a"}), Error);
  CHECK_THROWS_AS(subset_models(t, {"nope"}), Error);

  auto q = subset_prompts(t, {"p1"});
  CHECK(q.prompts() == std::vector<PromptId>{"p1"});
  CHECK(q.models() == t.models());
}

TEST_CASE("reference set checks coverage and duplicates") {
  auto t = small_table();
  ReferenceSet refs;
  refs.set("p0", "r0");
  CHECK_THROWS_AS(refs.set("p0", "again"), Error);
  CHECK_FALSE(refs.covers(t));
  refs.set("p1", "r1");
  CHECK(refs.covers(t));
  CHECK(refs.reference("p1") == "r1");
  CHECK_THROWS_AS((void)refs.reference("p9"), Error);
}
