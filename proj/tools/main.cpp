#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "trirank/cli.hpp"
#include "trirank/core.hpp"

namespace {

// 2 for configuration mistakes, 1 for everything else that went wrong.
int exit_code_for(const trirank::Error& e) {
  switch (e.kind) {
    case trirank::ErrorKind::kInvalidParams:
    case trirank::ErrorKind::kInvalidProbability:
    case trirank::ErrorKind::kInvalidSpec:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference-free model ranking by triplet peer evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file");
  app.failure_message(CLI::FailureMessage::help);

  trirank::RankOptions rank;
  auto* cmd_rank = app.add_subcommand(
      "rank", "Rank the models of a dataset with gtr, ftr and mca");
  cmd_rank->add_option("--data", rank.data_path, "Response table (.jsonl/.csv, optionally .gz)")
      ->required();
  cmd_rank->add_option("--refs", rank.refs_path, "Reference answers (.jsonl)");
  cmd_rank->add_option("--tensor", rank.tensor_path,
                       "Replay ftr from an exported tensor CSV");
  cmd_rank->add_option("--ranker", rank.rankers,
                       "Rankers to run: gtr, ftr, mca (default all)");
  cmd_rank->add_option("--scorer", rank.scorer,
                       "rouge2-word | rouge2-char | exact | noisy-exact:p=<f>");
  cmd_rank->add_option("--mca-mode", rank.mca_mode, "choice | generative");
  cmd_rank->add_option("--mca-top-k", rank.mca_top_k,
                       "Pooled bigrams kept per prompt in generative mode");
  cmd_rank->add_option("--mca-bigrams", rank.mca_bigrams, "word | character");
  cmd_rank->add_option("--seed", rank.seed, "Master seed");
  cmd_rank->add_option("--epsilon", rank.epsilon, "FTR convergence threshold");
  cmd_rank->add_option("--max-iter", rank.max_iter, "FTR iteration cap");
  cmd_rank->add_option("--rbo-p", rank.rbo_p, "RBO persistence");
  cmd_rank->add_option("--map-k", rank.map_ks, "MAP depths");
  cmd_rank->add_option("--workers", rank.workers, "Tensor build threads");
  cmd_rank->add_option("--out", rank.out_dir, "Output directory")->required();

  trirank::SimulateOptions sim;
  auto* cmd_sim = app.add_subcommand(
      "simulate", "Seeded ranking sweeps on synthetic or sampled data");
  cmd_sim->add_option("--models", sim.n_models, "Model counts (synthetic axis)");
  cmd_sim->add_option("--best-acc", sim.best_acc,
                      "Best model accuracies (synthetic axis)");
  cmd_sim->add_option("--questions", sim.n_questions,
                      "Question counts (synthetic axis)");
  cmd_sim->add_option("--answers", sim.n_answers,
                      "Answer-space sizes (synthetic axis)");
  cmd_sim->add_option("--noise", sim.noise,
                      "Scorer flip probabilities (synthetic axis)");
  cmd_sim->add_option("--regime", sim.regime, "shared | disjoint");
  cmd_sim->add_option("--data", sim.data_path,
                      "Switch to dataset mode: sample from this table");
  cmd_sim->add_option("--refs", sim.refs_path, "References for dataset mode");
  cmd_sim->add_option("--scorer", sim.scorer, "Scorer for dataset mode");
  cmd_sim->add_option("--sample-n", sim.sample_sizes,
                      "Model subset sizes (dataset axis)");
  cmd_sim->add_option("--sampling", sim.sampling, "random | spread | close");
  cmd_sim->add_option("--window", sim.window, "Window for close sampling");
  cmd_sim->add_option("--prompt-sizes", sim.prompt_sizes,
                      "Prompt subset sizes (dataset axis)");
  cmd_sim->add_option("--ranker", sim.rankers, "gtr, ftr, mca");
  cmd_sim->add_option("--mca-mode", sim.mca_mode, "choice | generative");
  cmd_sim->add_option("--mca-top-k", sim.mca_top_k,
                      "Pooled bigrams kept per prompt in generative mode");
  cmd_sim->add_option("--mca-bigrams", sim.mca_bigrams, "word | character");
  cmd_sim->add_option("--trials", sim.trials, "Trials per cell");
  cmd_sim->add_option("--seed", sim.seed, "Master seed");
  cmd_sim->add_option("--epsilon", sim.epsilon, "FTR convergence threshold");
  cmd_sim->add_option("--max-iter", sim.max_iter, "FTR iteration cap");
  cmd_sim->add_option("--rbo-p", sim.rbo_p, "RBO persistence");
  cmd_sim->add_option("--map-k", sim.map_ks, "MAP depths");
  cmd_sim->add_option("--workers", sim.workers, "Parallel trials");
  cmd_sim->add_option("--out", sim.out_dir, "Output directory")->required();

  trirank::TheoryOptions theory;
  auto* cmd_theory = app.add_subcommand(
      "theory", "Accuracy-grid check of the triplet voting conditions");
  cmd_theory->add_option("--step", theory.step, "Accuracy grid step");
  cmd_theory->add_option("--triple", theory.triples,
                         "Explicit a_i,a_j,a_k triples instead of the grid");
  cmd_theory->add_option("--questions", theory.n_questions,
                         "Questions per trial");
  cmd_theory->add_option("--trials", theory.trials, "Trials per cell");
  cmd_theory->add_option("--seed", theory.seed, "Master seed");
  cmd_theory->add_option("--out", theory.out_dir, "Output directory")
      ->required();

  trirank::TensorExportOptions tensor;
  auto* cmd_tensor = app.add_subcommand(
      "tensor-export", "Evaluate all triplets once and write the tensor CSV");
  cmd_tensor->add_option("--data", tensor.data_path, "Response table")
      ->required();
  cmd_tensor->add_option("--scorer", tensor.scorer, "Scorer name");
  cmd_tensor->add_option("--seed", tensor.seed, "Master seed");
  cmd_tensor->add_option("--workers", tensor.workers, "Tensor build threads");
  cmd_tensor->add_option("--out", tensor.out_path, "Output CSV path")
      ->required();

  trirank::JudgeOptions judge;
  std::string token_env = "TRIRANK_JUDGE_TOKEN";
  auto* cmd_judge = app.add_subcommand(
      "judge", "Rank models by win rate under an external pairwise judge");
  cmd_judge->add_option("--data", judge.data_path, "Response table")
      ->required();
  cmd_judge->add_option("--refs", judge.refs_path,
                        "References, enables quality metrics");
  cmd_judge->add_option("--prompts", judge.prompts_path,
                        "JSONL prompt_id/text instruction file");
  cmd_judge->add_option("--url", judge.url, "Judge endpoint URL")->required();
  cmd_judge->add_option("--token-env", token_env,
                        "Environment variable holding the bearer token");
  cmd_judge->add_option("--response-field", judge.response_field,
                        "Dot path of the completion text in the reply");
  cmd_judge->add_option("--temperature", judge.temperature,
                        "Judge sampling temperature");
  cmd_judge->add_option("--max-tokens", judge.max_tokens,
                        "Judge completion budget");
  cmd_judge->add_option("--timeout", judge.timeout_s, "Request timeout (s)");
  cmd_judge->add_option("--retries", judge.max_retries, "Retries per request");
  cmd_judge->add_option("--in-flight", judge.max_in_flight,
                        "Concurrent requests");
  cmd_judge->add_option("--rubric", judge.rubric, "Score rubric text");
  cmd_judge->add_option("--sample", judge.sample_size, "Prompts per pair");
  cmd_judge->add_option("--seed", judge.seed, "Prompt sampling seed");
  cmd_judge->add_option("--rbo-p", judge.rbo_p, "RBO persistence");
  cmd_judge->add_option("--map-k", judge.map_ks, "MAP depths");
  cmd_judge->add_option("--cache", judge.cache_path,
                        "Resumable judgement cache (JSONL)");
  cmd_judge->add_option("--out", judge.out_dir, "Output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_rank->parsed()) return trirank::run_rank(rank);
    if (cmd_sim->parsed()) return trirank::run_simulate(sim);
    if (cmd_theory->parsed()) return trirank::run_theory(theory);
    if (cmd_tensor->parsed()) return trirank::run_tensor_export(tensor);
    if (cmd_judge->parsed()) {
      if (const char* token = std::getenv(token_env.c_str()))
        judge.token = token;
      return trirank::run_judge(judge);
    }
  } catch (const trirank::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
