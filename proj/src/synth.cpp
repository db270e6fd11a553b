#include "trirank/synth.hpp"

#include <string>

#include "trirank/scorers.hpp"

namespace trirank {

void SyntheticSpec::validate() const {
  if (n_models == 0)
    throw Error(ErrorKind::kInvalidSpec, "n_models must be positive");
  if (accuracies.size() != n_models)
    throw Error(ErrorKind::kInvalidSpec,
                "need exactly one accuracy per model");
  for (double a : accuracies)
    if (!(a >= 0.0 && a <= 1.0))
      throw Error(ErrorKind::kInvalidSpec, "accuracy outside [0,1]");
  if (n_questions == 0)
    throw Error(ErrorKind::kInvalidSpec, "n_questions must be positive");
  if (n_answers < 2)
    throw Error(ErrorKind::kInvalidSpec, "n_answers must be at least 2");
}

LabeledTable generate(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<ModelId> models;
  for (std::size_t m = 0; m < spec.n_models; ++m)
    models.push_back("M" + std::to_string(m + 1));
  std::vector<PromptId> prompts;
  for (std::size_t q = 0; q < spec.n_questions; ++q)
    prompts.push_back("Q" + std::to_string(q));

  LabeledTable out{ResponseTable(models, prompts), {}};
  Rng rng(spec.seed);
  // Single pass in question-major order keeps the draw sequence fixed.
  for (std::size_t q = 0; q < spec.n_questions; ++q) {
    std::size_t truth = rng.below(spec.n_answers);
    out.truth.set(prompts[q], std::to_string(truth));
    for (std::size_t m = 0; m < spec.n_models; ++m) {
      if (rng.bernoulli(spec.accuracies[m])) {
        out.table.set_at(m, q, std::to_string(truth));
      } else if (spec.regime == WrongAnswerRegime::kSharedPool) {
        std::size_t r = rng.below(spec.n_answers - 1);
        if (r >= truth) ++r;
        out.table.set_at(m, q, std::to_string(r));
      } else {
        // Token unique to this (model, question), outside the option set.
        out.table.set_at(
            m, q,
            std::to_string(spec.n_answers + m * spec.n_questions + q));
      }
    }
  }
  return out;
}

namespace {

void require_ordered(double a_i, double a_j, double a_k) {
  if (!(1.0 >= a_i && a_i > a_j && a_j > a_k && a_k >= 0.0))
    throw Error(ErrorKind::kOrderingViolated,
                "accuracies must satisfy 1 >= a_i > a_j > a_k >= 0");
}

}  // namespace

bool lemma1_holds(double a_i, double a_j, double a_k) {
  require_ordered(a_i, a_j, a_k);
  return a_k < a_i + a_j - 1.0;
}

bool thm1_holds(double a_i, double a_j, double a_k, double m) {
  require_ordered(a_i, a_j, a_k);
  if (!(m >= 0.0 && m <= 1.0))
    throw Error(ErrorKind::kInvalidParams, "m outside [0,1]");
  return a_k < a_i + a_j - 1.0 - m;
}

double measure_overlap_m(const ResponseTable& table, const ReferenceSet& truth,
                         const ModelId& i, const ModelId& j) {
  if (i == j)
    throw Error(ErrorKind::kNonDistinctModels, "need two distinct models");
  std::size_t mi = table.model_index(i);
  std::size_t mj = table.model_index(j);
  std::size_t overlap = 0;
  for (std::size_t q = 0; q < table.n_prompts(); ++q) {
    const std::string& ref = truth.reference(table.prompts()[q]);
    const std::string& ri = table.at(mi, q);
    const std::string& rj = table.at(mj, q);
    if (!exact_match(ri, ref) && !exact_match(rj, ref) && exact_match(ri, rj))
      ++overlap;
  }
  if (table.n_prompts() == 0) return 0.0;
  return static_cast<double>(overlap) /
         static_cast<double>(table.n_prompts());
}

std::vector<double> accuracy_ladder(double best, std::size_t n) {
  if (!(best > 0.0 && best <= 1.0))
    throw Error(ErrorKind::kInvalidParams, "best accuracy outside (0,1]");
  if (n == 0) throw Error(ErrorKind::kInvalidParams, "need at least one model");
  std::vector<double> acc(n);
  double low = best / 9.0;
  for (std::size_t t = 0; t < n; ++t)
    acc[t] = n == 1 ? best
                    : best - (best - low) * static_cast<double>(t) /
                                 static_cast<double>(n - 1);
  return acc;
}

}  // namespace trirank
