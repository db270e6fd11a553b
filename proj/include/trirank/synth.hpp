#pragma once

#include <cstddef>
#include <vector>

#include "trirank/core.hpp"
#include "trirank/rng.hpp"

namespace trirank {

enum class WrongAnswerRegime {
  kSharedPool,        // wrong answers drawn from the common option set
  kDisjointPerModel,  // wrong answer unique per (model, question)
};

struct SyntheticSpec {
  std::size_t n_models = 0;
  std::vector<double> accuracies;  // one per model
  std::size_t n_questions = 0;
  std::size_t n_answers = 0;  // >= 2
  WrongAnswerRegime regime = WrongAnswerRegime::kSharedPool;
  Seed seed = 0;

  void validate() const;  // throws InvalidSpec
};

struct LabeledTable {
  ResponseTable table;
  ReferenceSet truth;
};

// Multiple-choice style table with models M1..Mn and questions Q0..Q{q-1}.
// Per question the ground truth is uniform over the option tokens
// "0".."n_answers-1"; a model with accuracy a copies it with probability a
// and otherwise answers wrong per the regime. Disjoint wrong tokens extend
// the alphabet past the option set so no two models ever share one.
LabeledTable generate(const SyntheticSpec& spec);

// Accuracy condition under which two better models always out-vote the
// worst: a_k < a_i + a_j - 1. Requires 1 >= a_i > a_j > a_k >= 0.
bool lemma1_holds(double a_i, double a_j, double a_k);

// Same with an allowance m for the fraction of the dataset on which wrong
// answers may coincide: a_k < a_i + a_j - 1 - m.
bool thm1_holds(double a_i, double a_j, double a_k, double m);

// Fraction of all prompts where models i and j are both wrong and give the
// same response.
double measure_overlap_m(const ResponseTable& table, const ReferenceSet& truth,
                         const ModelId& i, const ModelId& j);

// Evenly spaced accuracies from `best` down to best/9, one per model. Used
// by sweeps that fix only the best model's accuracy.
std::vector<double> accuracy_ladder(double best, std::size_t n);

}  // namespace trirank
