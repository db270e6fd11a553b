// Python bindings for the core ranking operations. Scorers are passed by
// name ("rouge2-word", "rouge2-char", "exact", "noisy-exact:p=<f>") and
// seeded the same way the command line tool seeds them, so results line up
// between the two front ends.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trirank/core.hpp"
#include "trirank/ingest.hpp"
#include "trirank/rankers.hpp"
#include "trirank/rankqual.hpp"
#include "trirank/rng.hpp"
#include "trirank/scorers.hpp"
#include "trirank/synth.hpp"
#include "trirank/triplet.hpp"

namespace py = pybind11;
using namespace trirank;

namespace {

// Stream ids shared with the CLI front end.
constexpr std::uint64_t kStreamGtrCoin = 1;
constexpr std::uint64_t kStreamScorer = 2;
constexpr std::uint64_t kMcaAgreementStream = 0x6d6361;

ScorerSpec make_spec(const std::string& scorer, Seed seed) {
  return ScorerSpec::parse(scorer, Rng::derive(seed, kStreamScorer));
}

BigramMode parse_bigrams(const std::string& mode) {
  if (mode == "word") return BigramMode::kWord;
  if (mode == "character") return BigramMode::kCharacter;
  throw Error(ErrorKind::kInvalidParams, "bigrams must be word or character");
}

WrongAnswerRegime parse_regime(const std::string& regime) {
  if (regime == "shared") return WrongAnswerRegime::kSharedPool;
  if (regime == "disjoint") return WrongAnswerRegime::kDisjointPerModel;
  throw Error(ErrorKind::kInvalidParams, "regime must be shared or disjoint");
}

py::dict gtr_py(const ResponseTable& table, const std::string& scorer,
                Seed seed) {
  Rng coin(Rng::derive(seed, kStreamGtrCoin));
  GtrResult res = gtr(table, make_spec(scorer, seed), coin);
  py::dict out;
  out["ranking"] = res.ranking;
  out["votes"] = res.trace.votes;
  out["pair_resolutions"] = res.trace.pair_resolutions;
  out["evaluations"] = res.trace.evaluations;
  return out;
}

py::dict ftr_py(const ResponseTable& table, const std::string& scorer,
                Seed seed, double epsilon, std::size_t max_iter, int workers) {
  FtrResult res = ftr(table, make_spec(scorer, seed), epsilon, max_iter,
                      workers);
  py::dict out;
  out["ranking"] = res.ranking;
  out["models"] = res.models;
  out["reputation"] = res.reputation;
  out["iterations"] = res.iterations;
  out["converged"] = res.converged;
  out["delta_log"] = res.delta_log;
  out["evaluations"] = res.evaluations;
  return out;
}

py::dict scored_to_dict(const ScoredRanking& r) {
  py::dict out;
  out["ranking"] = r.ranking;
  out["scores"] = r.scores;
  return out;
}

py::dict mca_choice_py(const ResponseTable& table, const std::string& scorer,
                       Seed seed) {
  ScorerSpec spec = make_spec(scorer, seed);
  std::unique_ptr<Scorer> agreement;
  if (spec.stochastic()) agreement = spec.instance(kMcaAgreementStream);
  return scored_to_dict(mca_multiple_choice(table, agreement.get()));
}

py::dict mca_generative_py(const ResponseTable& table, std::size_t top_k,
                           const std::string& bigrams) {
  return scored_to_dict(mca_generative(table, top_k, parse_bigrams(bigrams)));
}

py::dict true_ranking_py(const ResponseTable& table, const ReferenceSet& refs,
                         const std::string& scorer, Seed seed) {
  auto instance = make_spec(scorer, seed).instance(0);
  return scored_to_dict(true_ranking(table, refs, *instance));
}

std::optional<std::string> worst_py(const ResponseTable& table,
                                    const std::string& a, const std::string& b,
                                    const std::string& c,
                                    const std::string& scorer, Seed seed) {
  return worst_of_triplet({a, b, c}, table, make_spec(scorer, seed));
}

py::tuple generate_py(const std::vector<double>& accuracies,
                      std::size_t n_questions, std::size_t n_answers,
                      const std::string& regime, Seed seed) {
  SyntheticSpec spec;
  spec.n_models = accuracies.size();
  spec.accuracies = accuracies;
  spec.n_questions = n_questions;
  spec.n_answers = n_answers;
  spec.regime = parse_regime(regime);
  spec.seed = seed;
  LabeledTable out = generate(spec);
  return py::make_tuple(out.table, out.truth);
}

py::tuple load_dataset_py(const std::string& path) {
  LoadedDataset ds = load_dataset(path);
  return py::make_tuple(ds.table,
                        ds.references ? py::cast(*ds.references)
                                      : py::object(py::none()));
}

std::string tensor_csv_py(const ResponseTable& table, const std::string& scorer,
                          Seed seed, int workers) {
  return build_tensor(table, make_spec(scorer, seed), workers).to_csv();
}

py::dict ftr_from_tensor_csv_py(const std::string& csv, double epsilon,
                                std::size_t max_iter) {
  FtrResult res =
      ftr_from_tensor(TripletTensor::from_csv(csv), epsilon, max_iter);
  py::dict out;
  out["ranking"] = res.ranking;
  out["models"] = res.models;
  out["reputation"] = res.reputation;
  out["iterations"] = res.iterations;
  out["converged"] = res.converged;
  out["delta_log"] = res.delta_log;
  return out;
}

double rouge2_py(const std::string& candidate, const std::string& reference,
                 const std::string& bigrams) {
  return rouge2_f(candidate, reference, parse_bigrams(bigrams));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reference-free model ranking through triplet peer evaluation";

  py::class_<ResponseTable>(m, "ResponseTable",
                            "Complete grid of responses, one per (model, "
                            "prompt), in insertion order.")
      .def(py::init<>())
      .def(py::init<std::vector<ModelId>, std::vector<PromptId>>(),
           py::arg("models"), py::arg("prompts"))
      .def("add_model", &ResponseTable::add_model, py::arg("model"))
      .def("add_prompt", &ResponseTable::add_prompt, py::arg("prompt"))
      .def("set", &ResponseTable::set, py::arg("model"), py::arg("prompt"),
           py::arg("response"))
      .def("response", &ResponseTable::response, py::arg("model"),
           py::arg("prompt"), py::return_value_policy::copy)
      .def("models", &ResponseTable::models, py::return_value_policy::copy)
      .def("prompts", &ResponseTable::prompts, py::return_value_policy::copy)
      .def("n_models", &ResponseTable::n_models)
      .def("n_prompts", &ResponseTable::n_prompts);

  py::class_<ReferenceSet>(m, "ReferenceSet",
                           "Ground truth answers keyed by prompt.")
      .def(py::init<>())
      .def("set", &ReferenceSet::set, py::arg("prompt"), py::arg("reference"))
      .def("has", &ReferenceSet::has, py::arg("prompt"))
      .def("reference", &ReferenceSet::reference, py::arg("prompt"),
           py::return_value_policy::copy)
      .def("prompts", &ReferenceSet::prompts, py::return_value_policy::copy)
      .def("size", &ReferenceSet::size);

  m.def("load_dataset", &load_dataset_py, py::arg("path"),
        "Load a .jsonl/.csv (optionally .gz) response table. Returns (table, "
        "references or None).");
  m.def("load_references", &load_references, py::arg("path"),
        "Load references from JSONL records {\"prompt_id\", \"reference\"}.");

  m.def("generate", &generate_py, py::arg("accuracies"),
        py::arg("n_questions"), py::arg("n_answers") = 10,
        py::arg("regime") = "shared", py::arg("seed") = 0,
        "Synthetic multiple-choice table for models of the given accuracies. "
        "Returns (table, references) with the correct option per prompt.");
  m.def("accuracy_ladder", &accuracy_ladder, py::arg("best"), py::arg("n"),
        "Evenly spaced accuracies from best down to best/9.");
  m.def("lemma1_holds", &lemma1_holds, py::arg("a_i"), py::arg("a_j"),
        py::arg("a_k"),
        "True when the two better models always out-vote the worst: a_k < "
        "a_i + a_j - 1.");
  m.def("thm1_holds", &thm1_holds, py::arg("a_i"), py::arg("a_j"),
        py::arg("a_k"), py::arg("m"),
        "Same condition with an allowance m for coinciding wrong answers.");
  m.def("measure_overlap_m", &measure_overlap_m, py::arg("table"),
        py::arg("truth"), py::arg("model_i"), py::arg("model_j"),
        "Fraction of prompts where both models give the same wrong answer.");

  m.def("gtr", &gtr_py, py::arg("table"), py::arg("scorer") = "rouge2-word",
        py::arg("seed") = 0,
        "Greedy triplet ranking. Returns a dict with the ranking and the "
        "evaluation counters.");
  m.def("ftr", &ftr_py, py::arg("table"), py::arg("scorer") = "rouge2-word",
        py::arg("seed") = 0, py::arg("epsilon") = 1e-6,
        py::arg("max_iter") = 100, py::arg("workers") = 1,
        "Full triplet ranking via iterated reputation-weighted votes.");
  m.def("mca_choice", &mca_choice_py, py::arg("table"),
        py::arg("scorer") = "exact", py::arg("seed") = 0,
        "Most-common-answer baseline for single-token answers.");
  m.def("mca_generative", &mca_generative_py, py::arg("table"),
        py::arg("top_k") = 256, py::arg("bigrams") = "word",
        "Most-common-answer baseline for free text, scored against pooled "
        "bigrams.");
  m.def("true_ranking", &true_ranking_py, py::arg("table"),
        py::arg("references"), py::arg("scorer") = "rouge2-word",
        py::arg("seed") = 0,
        "Reference-based ranking by mean score(reference, response).");
  m.def("worst_of_triplet", &worst_py, py::arg("table"), py::arg("model_a"),
        py::arg("model_b"), py::arg("model_c"),
        py::arg("scorer") = "rouge2-word", py::arg("seed") = 0,
        "Consensus-worst of three models, or None without consensus.");

  m.def("tensor_csv", &tensor_csv_py, py::arg("table"),
        py::arg("scorer") = "rouge2-word", py::arg("seed") = 0,
        py::arg("workers") = 1,
        "Every (pair, judge) verdict as CSV, replayable by "
        "ftr_from_tensor_csv.");
  m.def("ftr_from_tensor_csv", &ftr_from_tensor_csv_py, py::arg("csv"),
        py::arg("epsilon") = 1e-6, py::arg("max_iter") = 100,
        "Reputation iteration on an exported verdict tensor.");

  m.def("rbo", &rbo, py::arg("a"), py::arg("b"), py::arg("p") = 0.95,
        "Rank-biased overlap between two rankings of the same model set.");
  m.def("map_at_k", &map_at_k, py::arg("estimated"), py::arg("truth"),
        py::arg("k"),
        "Average precision at k with truth's top k as the relevant set.");
  m.def("rouge2_f", &rouge2_py, py::arg("candidate"), py::arg("reference"),
        py::arg("bigrams") = "word", "Bigram-overlap f-measure.");
  m.def("exact_match", &exact_match, py::arg("a"), py::arg("b"),
        "1 iff equal after trimming surrounding whitespace.");
}
