#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "trirank/core.hpp"
#include "trirank/rng.hpp"

namespace trirank {

// Stable per-trial seed: master seed mixed with a cell fingerprint string
// and the trial index. Adding cells or trials never perturbs earlier ones.
Seed trial_seed(Seed master, const std::string& cell_fingerprint,
                std::size_t trial);

struct RankOptions {
  std::string data_path;
  std::string refs_path;              // optional JSONL references
  std::string tensor_path;            // optional tensor replay (ftr only)
  std::vector<std::string> rankers;   // gtr, ftr, mca
  std::string scorer = "rouge2-word";
  std::string mca_mode = "choice";    // choice | generative
  std::size_t mca_top_k = 256;
  std::string mca_bigrams = "word";   // word | character
  Seed seed = 0;
  double epsilon = 1e-6;
  std::size_t max_iter = 100;
  double rbo_p = 0.95;
  std::vector<std::size_t> map_ks = {3, 5, 10};
  int workers = 1;
  std::string out_dir;
};

int run_rank(const RankOptions& opt);

struct SimulateOptions {
  // Synthetic sweep axes; the cross product forms the grid.
  std::vector<std::size_t> n_models = {10};
  std::vector<double> best_acc = {0.9};
  std::vector<std::size_t> n_questions = {50};
  std::vector<std::size_t> n_answers = {10};
  std::vector<double> noise = {0.0};
  std::string regime = "shared";  // shared | disjoint

  // Dataset mode (set data_path to enable): samples model subsets and
  // prompt subsets from a fixed corpus instead of generating tables.
  std::string data_path;
  std::string refs_path;
  std::string scorer = "exact";
  std::vector<std::size_t> sample_sizes;
  std::string sampling = "random";  // random | spread | close
  std::size_t window = 0;
  std::vector<std::size_t> prompt_sizes;

  std::vector<std::string> rankers = {"gtr", "ftr", "mca"};
  std::string mca_mode = "choice";  // choice | generative
  std::size_t mca_top_k = 256;
  std::string mca_bigrams = "word";
  std::size_t trials = 5;
  Seed seed = 0;
  double epsilon = 1e-6;
  std::size_t max_iter = 100;
  double rbo_p = 0.95;
  std::vector<std::size_t> map_ks = {3, 5, 10};
  int workers = 1;
  std::string out_dir;
};

int run_simulate(const SimulateOptions& opt);

struct TheoryOptions {
  double step = 0.1;
  std::vector<std::string> triples;  // optional "a_i,a_j,a_k" overrides
  std::size_t n_questions = 500;
  std::size_t trials = 100;
  Seed seed = 0;
  std::string out_dir;
};

int run_theory(const TheoryOptions& opt);

struct TensorExportOptions {
  std::string data_path;
  std::string scorer = "rouge2-word";
  Seed seed = 0;
  int workers = 1;
  std::string out_path;
};

int run_tensor_export(const TensorExportOptions& opt);

struct JudgeOptions {
  std::string data_path;
  std::string refs_path;     // optional, enables quality metrics
  std::string prompts_path;  // optional JSONL {"prompt_id","text"}
  std::string url;
  std::string token;
  std::string response_field = "text";
  double temperature = 0.0;
  int max_tokens = 512;
  double timeout_s = 60.0;
  int max_retries = 3;
  int max_in_flight = 4;
  std::string rubric = "Which is the better response?";
  std::size_t sample_size = 50;
  Seed seed = 0;
  double rbo_p = 0.95;
  std::vector<std::size_t> map_ks = {3, 5, 10};
  std::string cache_path;
  std::string out_dir;
};

int run_judge(const JudgeOptions& opt);

}  // namespace trirank
