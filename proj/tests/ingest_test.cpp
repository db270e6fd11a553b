#include <doctest.h>

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "trirank/ingest.hpp"
#include "trirank/io_util.hpp"

using namespace trirank;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("trirank_test_" + name) {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kJsonl =
    R"({"prompt_id":"p0","model_id":"A","response":"alpha"}
{"prompt_id":"p0","model_id":"B","response":"bravo"}
{"prompt_id":"p1","model_id":"A","response":"a,1"}
{"prompt_id":"p1","model_id":"B","response":"line\nbreak"}
)";

}  // namespace

TEST_CASE("jsonl datasets load with insertion order") {
  TempFile f("d.jsonl", kJsonl);
  auto ds = load_dataset(f.path);
  CHECK(ds.table.models() == std::vector<ModelId>{"A", "B"});
  CHECK(ds.table.prompts() == std::vector<PromptId>{"p0", "p1"});
  CHECK(ds.table.response("B", "p1") == "line\nbreak");
  CHECK_FALSE(ds.references.has_value());
}

TEST_CASE("jsonl rejects duplicates and junk") {
  TempFile dup("dup.jsonl",
               R"({"prompt_id":"p","model_id":"A","response":"x"}
{"prompt_id":"p","model_id":"A","response":"y"}
{"prompt_id":"p","model_id":"B","response":"z"}
)");
  CHECK_THROWS_AS(load_dataset(dup.path), Error);

  TempFile bad("bad.jsonl", "{nope\n");
  CHECK_THROWS_AS(load_dataset(bad.path), Error);

  TempFile missing("missing.jsonl", R"({"prompt_id":"p","response":"x"}
)");
  CHECK_THROWS_AS(load_dataset(missing.path), Error);

  // Incomplete grid: model B answered only one of two prompts.
  TempFile sparse("sparse.jsonl",
                  R"({"prompt_id":"p0","model_id":"A","response":"x"}
{"prompt_id":"p1","model_id":"A","response":"y"}
{"prompt_id":"p0","model_id":"B","response":"z"}
)");
  CHECK_THROWS_AS(load_dataset(sparse.path), Error);
}

TEST_CASE("csv datasets load, with and without the GT column") {
  TempFile f("d.csv",
             ",GT,A,B\n"
             "p0,g0,alpha,bravo\n"
             "p1,g1,\"a,1\",\"line\nbreak\"\n");
  auto ds = load_dataset(f.path);
  CHECK(ds.table.models() == std::vector<ModelId>{"A", "B"});
  REQUIRE(ds.references.has_value());
  CHECK(ds.references->reference("p1") == "g1");
  CHECK(ds.table.response("A", "p1") == "a,1");
  CHECK(ds.table.response("B", "p1") == "line\nbreak");

  TempFile g("g.csv",
             ",A,B\n"
             "p0,x,y\n");
  auto ds2 = load_dataset(g.path);
  CHECK_FALSE(ds2.references.has_value());
  CHECK(ds2.table.response("B", "p0") == "y");
}

TEST_CASE("csv loader flags malformed rows") {
  TempFile ragged("ragged.csv", ",A,B\np0,x\n");
  CHECK_THROWS_AS(load_dataset(ragged.path), Error);
  TempFile dup("dupr.csv", ",A,B\np0,x,y\np0,x,y\n");
  CHECK_THROWS_AS(load_dataset(dup.path), Error);
  TempFile unterminated("unt.csv", ",A,B\np0,\"x,y\n");
  CHECK_THROWS_AS(load_dataset(unterminated.path), Error);
}

TEST_CASE("format follows the extension, including gz") {
  TempFile f("ext.wat", "x");
  CHECK_THROWS_AS(load_dataset(f.path), Error);

  // Round-trip through gzip using the zlib-backed reader.
  TempFile plain("rt.jsonl", kJsonl);
  auto ds = load_dataset(plain.path);
  std::string packed = plain.path + ".gz";
  {
    gzFile gz = gzopen(packed.c_str(), "wb");
    REQUIRE(gz != nullptr);
    gzwrite(gz, kJsonl, unsigned(std::string(kJsonl).size()));
    gzclose(gz);
  }
  auto ds2 = load_dataset(packed);
  CHECK(dataset_to_jsonl(ds2.table) == dataset_to_jsonl(ds.table));
  std::remove(packed.c_str());
}

TEST_CASE("exports round-trip byte-identically") {
  TempFile f("rt2.jsonl", kJsonl);
  auto ds = load_dataset(f.path);
  std::string jsonl = dataset_to_jsonl(ds.table);
  TempFile f2("rt3.jsonl", jsonl);
  auto ds2 = load_dataset(f2.path);
  CHECK(dataset_to_jsonl(ds2.table) == jsonl);

  ReferenceSet refs;
  refs.set("p0", "g0");
  refs.set("p1", "g,1");
  std::string csv = dataset_to_csv(ds.table, &refs);
  TempFile f3("rt4.csv", csv);
  auto ds3 = load_dataset(f3.path);
  CHECK(dataset_to_csv(ds3.table, &*ds3.references) == csv);
  CHECK(ds3.references->reference("p1") == "g,1");

  std::string rj = references_to_jsonl(refs);
  TempFile f4("rt5.jsonl", rj);
  auto back = load_references(f4.path);
  CHECK(references_to_jsonl(back) == rj);
}

TEST_CASE("sampling strategies") {
  Ranking pop;
  for (int i = 0; i < 20; ++i) pop.push_back("m" + std::to_string(i));

  SUBCASE("random draws distinct models, draw order preserved") {
    Rng rng(4);
    auto s = sample_models(SamplingStrategy::random(8), pop, rng);
    CHECK(s.size() == 8);
    CHECK(std::set<ModelId>(s.begin(), s.end()).size() == 8);
    Rng rng2(4);
    CHECK(sample_models(SamplingStrategy::random(8), pop, rng2) == s);
  }

  SUBCASE("spread walks a fixed stride") {
    Rng rng(9);
    auto s = sample_models(SamplingStrategy::spread(5), pop, rng);
    REQUIRE(s.size() == 5);
    // stride floor(20/5) = 4 from a start in [0,4)
    std::size_t first = 0;
    while (pop[first] != s[0]) ++first;
    CHECK(first < 4);
    for (std::size_t t = 1; t < 5; ++t) {
      std::size_t idx = 0;
      while (pop[idx] != s[t]) ++idx;
      CHECK(idx == first + 4 * t);
    }
  }

  SUBCASE("close keeps everything inside one window") {
    Rng rng(13);
    auto s = sample_models(SamplingStrategy::close(4, 3), pop, rng);
    REQUIRE(s.size() == 4);
    std::size_t lo = pop.size(), hi = 0;
    for (const auto& m : s) {
      std::size_t idx = 0;
      while (pop[idx] != m) ++idx;
      lo = std::min(lo, idx);
      hi = std::max(hi, idx);
    }
    CHECK(hi - lo <= 6);  // 2w span
    CHECK(std::set<ModelId>(s.begin(), s.end()).size() == 4);
  }

  SUBCASE("close validates its geometry") {
    Rng rng(1);
    // 2w >= N
    CHECK_THROWS_AS(
        sample_models(SamplingStrategy::close(3, 10), pop, rng), Error);
    // n > 2w+1
    CHECK_THROWS_AS(
        sample_models(SamplingStrategy::close(8, 3), pop, rng), Error);
  }

  SUBCASE("n larger than the population is rejected") {
    Rng rng(1);
    CHECK_THROWS_AS(
        sample_models(SamplingStrategy::random(21), pop, rng), Error);
    CHECK_THROWS_AS(sample_models(SamplingStrategy::random(0), pop, rng),
                    Error);
  }

  SUBCASE("parse maps names") {
    CHECK(SamplingStrategy::parse("random", 3, 0).kind ==
          SamplingStrategy::Kind::kRandom);
    CHECK(SamplingStrategy::parse("spread", 3, 0).kind ==
          SamplingStrategy::Kind::kSpread);
    auto c = SamplingStrategy::parse("close", 3, 5);
    CHECK(c.kind == SamplingStrategy::Kind::kClose);
    CHECK(c.window == 5);
    CHECK_THROWS_AS(SamplingStrategy::parse("fancy", 3, 0), Error);
  }
}

TEST_CASE("csv escaping quotes only when needed") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_escape("") == "");
}
