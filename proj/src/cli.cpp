#include "trirank/cli.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "trirank/ingest.hpp"
#include "trirank/io_util.hpp"
#include "trirank/judgeclient.hpp"
#include "trirank/rankers.hpp"
#include "trirank/rankqual.hpp"
#include "trirank/scorers.hpp"
#include "trirank/synth.hpp"
#include "trirank/triplet.hpp"

#include <json.hpp>

namespace trirank {
namespace {

// Stream indices for the independent random streams a trial spawns.
enum : std::uint64_t {
  kStreamGenerate = 0,
  kStreamGtrCoin = 1,
  kStreamScorer = 2,
  kStreamPromptSample = 3,
  kStreamModelSample = 4,
};

constexpr std::uint64_t kMcaAgreementStream = 0x6d6361;  // clear of gtr/ftr

void ensure_dir(const std::string& dir) {
  if (dir.empty())
    throw Error(ErrorKind::kInvalidParams, "output directory not set");
  std::filesystem::create_directories(dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers < 1) workers = 1;
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex mu;
  auto run = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int w = std::min<std::size_t>(workers, count);
  for (int t = 0; t < w; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct TrialMetrics {
  double rbo = 0.0;
  std::map<std::size_t, double> maps;
  std::uint64_t evaluations = 0;
};

TrialMetrics score_ranking(const Ranking& estimated, const Ranking& truth,
                           double rbo_p, const std::vector<std::size_t>& ks,
                           std::uint64_t evals) {
  TrialMetrics m;
  m.rbo = rbo(estimated, truth, rbo_p);
  for (std::size_t k : ks) m.maps[k] = map_at_k(estimated, truth, k);
  m.evaluations = evals;
  return m;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Sample standard deviation (n-1); zero when fewer than two samples.
double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::vector<std::string> default_rankers(const std::vector<std::string>& r) {
  if (r.empty()) return {"gtr", "ftr", "mca"};
  for (const auto& name : r)
    if (name != "gtr" && name != "ftr" && name != "mca")
      throw Error(ErrorKind::kInvalidParams, "unknown ranker: " + name);
  return r;
}

BigramMode parse_bigram_mode(const std::string& name) {
  if (name == "word") return BigramMode::kWord;
  if (name == "character" || name == "char") return BigramMode::kCharacter;
  throw Error(ErrorKind::kInvalidParams, "unknown bigram mode: " + name);
}

WrongAnswerRegime parse_regime(const std::string& name) {
  if (name == "shared") return WrongAnswerRegime::kSharedPool;
  if (name == "disjoint") return WrongAnswerRegime::kDisjointPerModel;
  throw Error(ErrorKind::kInvalidParams, "unknown regime: " + name);
}

std::string quality_header(const std::vector<std::size_t>& ks) {
  std::ostringstream out;
  out << "ranker,evaluations,rbo";
  for (std::size_t k : ks) out << ",map@" << k;
  return out.str();
}

std::string quality_row(const std::string& ranker, const TrialMetrics& m,
                        const std::vector<std::size_t>& ks) {
  std::ostringstream out;
  out << ranker << "," << m.evaluations << "," << fmt_double(m.rbo);
  for (std::size_t k : ks) out << "," << fmt_double(m.maps.at(k));
  return out.str();
}

}  // namespace

Seed trial_seed(Seed master, const std::string& cell_fingerprint,
                std::size_t trial) {
  std::string fp = cell_fingerprint + ";trial=" + std::to_string(trial);
  return splitmix64(master ^ fnv1a64(fp));
}

int run_rank(const RankOptions& opt) {
  ScorerSpec scorer = ScorerSpec::parse(opt.scorer, Rng::derive(opt.seed, kStreamScorer));
  auto rankers = default_rankers(opt.rankers);
  BigramMode mca_mode_bigrams = parse_bigram_mode(opt.mca_bigrams);
  if (opt.mca_mode != "choice" && opt.mca_mode != "generative")
    throw Error(ErrorKind::kInvalidParams, "unknown mca mode: " + opt.mca_mode);
  ensure_dir(opt.out_dir);

  LoadedDataset data = load_dataset(opt.data_path);
  std::optional<ReferenceSet> refs = std::move(data.references);
  if (!opt.refs_path.empty()) refs = load_references(opt.refs_path);

  std::ostringstream summary;
  summary << "dataset: " << data.table.n_models() << " models x "
          << data.table.n_prompts() << " prompts\n";

  std::optional<ScoredRanking> truth;
  if (refs) {
    auto truth_scorer = scorer.instance(0);
    truth = true_ranking(data.table, *refs, *truth_scorer);
    write_text_file(join_path(opt.out_dir, "true_ranking.csv"),
                    ranking_csv(*truth));
  }

  std::vector<std::string> quality_rows;
  for (const auto& name : rankers) {
    ScoredRanking ranked;
    std::uint64_t evals = 0;
    if (name == "gtr") {
      Rng coin(Rng::derive(opt.seed, kStreamGtrCoin));
      GtrResult res = gtr(data.table, scorer, coin);
      ranked.ranking = res.ranking;
      evals = res.trace.evaluations;
      summary << "gtr: " << res.trace.votes << " votes, "
              << res.trace.pair_resolutions << " pair resolutions, " << evals
              << " evaluations\n";
    } else if (name == "ftr") {
      FtrResult res =
          opt.tensor_path.empty()
              ? ftr(data.table, scorer, opt.epsilon, opt.max_iter, opt.workers)
              : ftr_from_tensor(
                    TripletTensor::from_csv(read_text_file(opt.tensor_path)),
                    opt.epsilon, opt.max_iter);
      for (std::size_t i = 0; i < res.ranking.size(); ++i) {
        ranked.ranking.push_back(res.ranking[i]);
        std::size_t at = std::find(res.models.begin(), res.models.end(),
                                   res.ranking[i]) -
                         res.models.begin();
        ranked.scores.push_back(res.reputation[at]);
      }
      evals = res.evaluations;
      write_text_file(join_path(opt.out_dir, "ftr_deltas.csv"), delta_csv(res));
      summary << "ftr: " << res.iterations << " iterations, "
              << (res.converged ? "converged" : "not converged") << ", "
              << evals << " evaluations\n";
    } else {
      std::unique_ptr<Scorer> agreement;
      if (scorer.stochastic()) agreement = scorer.instance(kMcaAgreementStream);
      ranked = opt.mca_mode == "choice"
                   ? mca_multiple_choice(data.table, agreement.get())
                   : mca_generative(data.table, opt.mca_top_k,
                                    mca_mode_bigrams);
      summary << "mca: mode " << opt.mca_mode << "\n";
    }
    write_text_file(join_path(opt.out_dir, "ranking_" + name + ".csv"),
                    ranking_csv(ranked));
    summary << name << " ranking:";
    for (const auto& m : ranked.ranking) summary << " " << m;
    summary << "\n";
    if (truth)
      quality_rows.push_back(quality_row(
          name,
          score_ranking(ranked.ranking, truth->ranking, opt.rbo_p, opt.map_ks,
                        evals),
          opt.map_ks));
  }

  if (truth) {
    std::ostringstream q;
    q << quality_header(opt.map_ks) << "\n";
    for (const auto& row : quality_rows) q << row << "\n";
    write_text_file(join_path(opt.out_dir, "quality.csv"), q.str());
    summary << "quality vs true ranking written to quality.csv\n";
  }

  write_text_file(join_path(opt.out_dir, "summary.txt"), summary.str());
  std::cout << summary.str();
  return 0;
}

namespace {

struct SynthCell {
  std::size_t n_models;
  double best;
  std::size_t n_questions;
  std::size_t n_answers;
  double noise;

  std::string fingerprint(const std::string& regime) const {
    std::ostringstream fp;
    fp << "models=" << n_models << ";best=" << fmt_double(best)
       << ";questions=" << n_questions << ";answers=" << n_answers
       << ";noise=" << fmt_double(noise) << ";regime=" << regime;
    return fp.str();
  }
};

struct DataCell {
  std::size_t sample_n;
  std::size_t prompt_size;

  std::string fingerprint(const std::string& sampling,
                          std::size_t window) const {
    std::ostringstream fp;
    fp << "sample=" << sample_n << ";strategy=" << sampling
       << ";window=" << window << ";prompts=" << prompt_size;
    return fp.str();
  }
};

// Per (cell, ranker): metric vectors across trials.
struct CellAgg {
  std::vector<double> rbos;
  std::map<std::size_t, std::vector<double>> maps;
  std::vector<double> evals;
};

ScorerSpec cell_scorer(const std::string& base, double noise, Seed seed) {
  if (noise > 0.0)
    return ScorerSpec::parse("noisy-exact:p=" + fmt_double(noise), seed);
  return ScorerSpec::parse(base, seed);
}

TrialMetrics run_one_ranker(const std::string& name,
                            const ResponseTable& table,
                            const Ranking& truth_order,
                            const ScorerSpec& scorer, Seed tseed,
                            double rbo_p, const std::vector<std::size_t>& ks,
                            double epsilon, std::size_t max_iter,
                            const std::string& mca_mode, std::size_t mca_top_k,
                            BigramMode mca_bigram_mode) {
  if (name == "gtr") {
    Rng coin(Rng::derive(tseed, kStreamGtrCoin));
    GtrResult res = gtr(table, scorer, coin);
    return score_ranking(res.ranking, truth_order, rbo_p, ks,
                         res.trace.evaluations);
  }
  if (name == "ftr") {
    FtrResult res = ftr(table, scorer, epsilon, max_iter, 1);
    return score_ranking(res.ranking, truth_order, rbo_p, ks, res.evaluations);
  }
  std::unique_ptr<Scorer> agreement;
  if (scorer.stochastic()) agreement = scorer.instance(kMcaAgreementStream);
  ScoredRanking ranked =
      mca_mode == "generative"
          ? mca_generative(table, mca_top_k, mca_bigram_mode)
          : mca_multiple_choice(table, agreement.get());
  return score_ranking(ranked.ranking, truth_order, rbo_p, ks, 0);
}

int simulate_synthetic(const SimulateOptions& opt) {
  WrongAnswerRegime regime = parse_regime(opt.regime);
  auto rankers = default_rankers(opt.rankers);
  if (opt.trials < 1)
    throw Error(ErrorKind::kInvalidParams, "trials must be at least 1");
  ensure_dir(opt.out_dir);

  std::vector<SynthCell> cells;
  for (std::size_t n : opt.n_models)
    for (double best : opt.best_acc)
      for (std::size_t q : opt.n_questions)
        for (std::size_t a : opt.n_answers)
          for (double p : opt.noise) cells.push_back({n, best, q, a, p});
  for (const auto& c : cells) {
    if (c.n_models < 3)
      throw Error(ErrorKind::kInvalidSpec, "cells need at least 3 models");
    if (!(c.noise >= 0.0 && c.noise <= 1.0))
      throw Error(ErrorKind::kInvalidSpec, "noise outside [0,1]");
  }

  std::size_t jobs = cells.size() * opt.trials;
  std::vector<std::vector<std::map<std::string, TrialMetrics>>> results(
      cells.size(),
      std::vector<std::map<std::string, TrialMetrics>>(opt.trials));

  parallel_for(jobs, opt.workers, [&](std::size_t job) {
    std::size_t ci = job / opt.trials;
    std::size_t trial = job % opt.trials;
    const SynthCell& cell = cells[ci];
    Seed tseed = trial_seed(opt.seed, cell.fingerprint(opt.regime), trial);

    SyntheticSpec spec;
    spec.n_models = cell.n_models;
    spec.accuracies = accuracy_ladder(cell.best, cell.n_models);
    spec.n_questions = cell.n_questions;
    spec.n_answers = cell.n_answers;
    spec.regime = regime;
    spec.seed = Rng::derive(tseed, kStreamGenerate);
    LabeledTable data = generate(spec);

    auto exact = ScorerSpec::parse("exact").instance(0);
    Ranking truth_order =
        true_ranking(data.table, data.truth, *exact).ranking;

    ScorerSpec scorer =
        cell_scorer("exact", cell.noise, Rng::derive(tseed, kStreamScorer));
    for (const auto& name : rankers)
      results[ci][trial][name] = run_one_ranker(
          name, data.table, truth_order, scorer, tseed, opt.rbo_p, opt.map_ks,
          opt.epsilon, opt.max_iter, "choice", 256, BigramMode::kWord);
  });

  // Raw rows and aggregates, both in fixed cell/trial/ranker order.
  std::ostringstream raw, agg, text;
  raw << "fingerprint,n_models,best_acc,n_questions,n_answers,noise,regime,"
         "trial,ranker,rbo";
  for (std::size_t k : opt.map_ks) raw << ",map@" << k;
  raw << ",evaluations\n";
  agg << "n_models,best_acc,n_questions,n_answers,noise,regime,ranker,trials,"
         "rbo_mean,rbo_std";
  for (std::size_t k : opt.map_ks)
    agg << ",map@" << k << "_mean,map@" << k << "_std";
  agg << ",evaluations_mean\n";

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const SynthCell& cell = cells[ci];
    std::string fp = cell.fingerprint(opt.regime);
    text << "cell " << fp << "\n";
    for (const auto& name : rankers) {
      CellAgg a;
      for (std::size_t t = 0; t < opt.trials; ++t) {
        const TrialMetrics& m = results[ci][t].at(name);
        raw << fp << "," << cell.n_models << "," << fmt_double(cell.best)
            << "," << cell.n_questions << "," << cell.n_answers << ","
            << fmt_double(cell.noise) << "," << opt.regime << "," << t << ","
            << name << "," << fmt_double(m.rbo);
        for (std::size_t k : opt.map_ks) raw << "," << fmt_double(m.maps.at(k));
        raw << "," << m.evaluations << "\n";
        a.rbos.push_back(m.rbo);
        for (std::size_t k : opt.map_ks) a.maps[k].push_back(m.maps.at(k));
        a.evals.push_back(static_cast<double>(m.evaluations));
      }
      agg << cell.n_models << "," << fmt_double(cell.best) << ","
          << cell.n_questions << "," << cell.n_answers << ","
          << fmt_double(cell.noise) << "," << opt.regime << "," << name << ","
          << opt.trials << "," << fmt_double(mean_of(a.rbos)) << ","
          << fmt_double(std_of(a.rbos));
      for (std::size_t k : opt.map_ks)
        agg << "," << fmt_double(mean_of(a.maps[k])) << ","
            << fmt_double(std_of(a.maps[k]));
      agg << "," << fmt_double(mean_of(a.evals)) << "\n";
      text << "  " << name << ": rbo " << fmt_double(mean_of(a.rbos)) << " +- "
           << fmt_double(std_of(a.rbos)) << ", evaluations "
           << fmt_double(mean_of(a.evals)) << "\n";
    }
  }

  write_text_file(join_path(opt.out_dir, "trials.csv"), raw.str());
  write_text_file(join_path(opt.out_dir, "summary.csv"), agg.str());
  write_text_file(join_path(opt.out_dir, "summary.txt"), text.str());
  std::cout << text.str();
  return 0;
}

int simulate_dataset(const SimulateOptions& opt) {
  auto rankers = default_rankers(opt.rankers);
  if (opt.trials < 1)
    throw Error(ErrorKind::kInvalidParams, "trials must be at least 1");
  ScorerSpec base_scorer = ScorerSpec::parse(opt.scorer);
  BigramMode mca_bigram_mode = parse_bigram_mode(opt.mca_bigrams);
  ensure_dir(opt.out_dir);

  LoadedDataset data = load_dataset(opt.data_path);
  std::optional<ReferenceSet> refs = std::move(data.references);
  if (!opt.refs_path.empty()) refs = load_references(opt.refs_path);
  if (!refs)
    throw Error(ErrorKind::kInvalidParams,
                "dataset sweeps need references for the true ranking");

  auto truth_scorer = base_scorer.instance(0);
  Ranking population = true_ranking(data.table, *refs, *truth_scorer).ranking;

  std::vector<std::size_t> sample_sizes = opt.sample_sizes;
  if (sample_sizes.empty()) sample_sizes = {data.table.n_models()};
  std::vector<std::size_t> prompt_sizes = opt.prompt_sizes;
  if (prompt_sizes.empty()) prompt_sizes = {data.table.n_prompts()};

  std::vector<DataCell> cells;
  for (std::size_t s : sample_sizes)
    for (std::size_t p : prompt_sizes) cells.push_back({s, p});
  for (const auto& c : cells) {
    if (c.sample_n < 3)
      throw Error(ErrorKind::kInvalidSpec, "cells need at least 3 models");
    if (c.prompt_size < 1 || c.prompt_size > data.table.n_prompts())
      throw Error(ErrorKind::kInvalidSpec, "bad prompt subset size");
  }

  std::size_t jobs = cells.size() * opt.trials;
  std::vector<std::vector<std::map<std::string, TrialMetrics>>> results(
      cells.size(),
      std::vector<std::map<std::string, TrialMetrics>>(opt.trials));

  parallel_for(jobs, opt.workers, [&](std::size_t job) {
    std::size_t ci = job / opt.trials;
    std::size_t trial = job % opt.trials;
    const DataCell& cell = cells[ci];
    std::string fp = cell.fingerprint(opt.sampling, opt.window);
    Seed tseed = trial_seed(opt.seed, fp, trial);

    Rng model_rng(Rng::derive(tseed, kStreamModelSample));
    SamplingStrategy strategy =
        SamplingStrategy::parse(opt.sampling, cell.sample_n, opt.window);
    std::vector<ModelId> models =
        sample_models(strategy, population, model_rng);

    ResponseTable sub = subset_models(data.table, models);
    if (cell.prompt_size < data.table.n_prompts()) {
      Rng prompt_rng(Rng::derive(tseed, kStreamPromptSample));
      std::vector<std::size_t> idx(data.table.n_prompts());
      std::iota(idx.begin(), idx.end(), 0);
      for (std::size_t t = 0; t < cell.prompt_size; ++t) {
        std::size_t pick = t + prompt_rng.below(idx.size() - t);
        std::swap(idx[t], idx[pick]);
      }
      idx.resize(cell.prompt_size);
      std::sort(idx.begin(), idx.end());  // keep table prompt order
      std::vector<PromptId> prompts;
      for (std::size_t i : idx) prompts.push_back(data.table.prompts()[i]);
      sub = subset_prompts(sub, prompts);
    }

    auto tscorer = base_scorer.instance(0);
    Ranking truth_order = true_ranking(sub, *refs, *tscorer).ranking;

    ScorerSpec scorer = base_scorer;
    scorer.seed = Rng::derive(tseed, kStreamScorer);
    for (const auto& name : rankers)
      results[ci][trial][name] = run_one_ranker(
          name, sub, truth_order, scorer, tseed, opt.rbo_p, opt.map_ks,
          opt.epsilon, opt.max_iter, opt.mca_mode, opt.mca_top_k,
          mca_bigram_mode);
  });

  std::ostringstream raw, agg, text;
  raw << "fingerprint,sample_n,strategy,window,prompt_size,trial,ranker,rbo";
  for (std::size_t k : opt.map_ks) raw << ",map@" << k;
  raw << ",evaluations\n";
  agg << "sample_n,strategy,window,prompt_size,ranker,trials,rbo_mean,rbo_std";
  for (std::size_t k : opt.map_ks)
    agg << ",map@" << k << "_mean,map@" << k << "_std";
  agg << ",evaluations_mean\n";

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const DataCell& cell = cells[ci];
    std::string fp = cell.fingerprint(opt.sampling, opt.window);
    text << "cell " << fp << "\n";
    for (const auto& name : rankers) {
      CellAgg a;
      for (std::size_t t = 0; t < opt.trials; ++t) {
        const TrialMetrics& m = results[ci][t].at(name);
        raw << fp << "," << cell.sample_n << "," << opt.sampling << ","
            << opt.window << "," << cell.prompt_size << "," << t << "," << name
            << "," << fmt_double(m.rbo);
        for (std::size_t k : opt.map_ks) raw << "," << fmt_double(m.maps.at(k));
        raw << "," << m.evaluations << "\n";
        a.rbos.push_back(m.rbo);
        for (std::size_t k : opt.map_ks) a.maps[k].push_back(m.maps.at(k));
        a.evals.push_back(static_cast<double>(m.evaluations));
      }
      agg << cell.sample_n << "," << opt.sampling << "," << opt.window << ","
          << cell.prompt_size << "," << name << "," << opt.trials << ","
          << fmt_double(mean_of(a.rbos)) << "," << fmt_double(std_of(a.rbos));
      for (std::size_t k : opt.map_ks)
        agg << "," << fmt_double(mean_of(a.maps[k])) << ","
            << fmt_double(std_of(a.maps[k]));
      agg << "," << fmt_double(mean_of(a.evals)) << "\n";
      text << "  " << name << ": rbo " << fmt_double(mean_of(a.rbos)) << " +- "
           << fmt_double(std_of(a.rbos)) << ", evaluations "
           << fmt_double(mean_of(a.evals)) << "\n";
    }
  }

  write_text_file(join_path(opt.out_dir, "trials.csv"), raw.str());
  write_text_file(join_path(opt.out_dir, "summary.csv"), agg.str());
  write_text_file(join_path(opt.out_dir, "summary.txt"), text.str());
  std::cout << text.str();
  return 0;
}

}  // namespace

int run_simulate(const SimulateOptions& opt) {
  return opt.data_path.empty() ? simulate_synthetic(opt)
                               : simulate_dataset(opt);
}

int run_theory(const TheoryOptions& opt) {
  if (!(opt.step > 0.0 && opt.step < 1.0))
    throw Error(ErrorKind::kInvalidParams, "step must lie in (0,1)");
  if (opt.trials < 1 || opt.n_questions < 1)
    throw Error(ErrorKind::kInvalidParams,
                "trials and questions must be positive");
  ensure_dir(opt.out_dir);

  std::vector<std::array<double, 3>> triples;
  if (opt.triples.empty()) {
    std::size_t count =
        static_cast<std::size_t>(std::floor(1.0 / opt.step + 1e-9));
    std::vector<double> grid;
    for (std::size_t i = 1; i <= count; ++i)
      grid.push_back(static_cast<double>(i) * opt.step);
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        for (std::size_t k = 0; k < j; ++k)
          triples.push_back({grid[i], grid[j], grid[k]});
  } else {
    for (const auto& text : opt.triples) {
      std::array<double, 3> t{};
      std::istringstream in(text);
      char c1 = 0, c2 = 0;
      if (!(in >> t[0] >> c1 >> t[1] >> c2 >> t[2]) || c1 != ',' || c2 != ',')
        throw Error(ErrorKind::kInvalidParams, "bad triple: " + text);
      if (!(1.0 >= t[0] && t[0] > t[1] && t[1] > t[2] && t[2] >= 0.0)) {
        std::cerr << "skipping triple " << text
                  << ": accuracies must satisfy 1 >= a_i > a_j > a_k >= 0\n";
        continue;
      }
      triples.push_back(t);
    }
  }

  struct Row {
    std::array<double, 3> a;
    bool lemma = false;
    bool unsat = false;
    double freq_disjoint = 0.0;
    double freq_shared = 0.0;
    double mean_m_shared = 0.0;
    bool thm_at_m = false;
  };
  std::vector<Row> rows(triples.size());

  parallel_for(triples.size(), 1, [&](std::size_t ti) {
    const auto& a = triples[ti];
    Row& row = rows[ti];
    row.a = a;
    row.lemma = lemma1_holds(a[0], a[1], a[2]);
    row.unsat = a[0] + a[1] <= 1.0;

    for (int regime = 0; regime < 2; ++regime) {
      std::string fp = "theory;a=" + fmt_double(a[0]) + "," +
                       fmt_double(a[1]) + "," + fmt_double(a[2]) +
                       ";regime=" + (regime == 0 ? "disjoint" : "shared");
      std::size_t hits = 0;
      double m_sum = 0.0;
      for (std::size_t t = 0; t < opt.trials; ++t) {
        SyntheticSpec spec;
        spec.n_models = 3;
        spec.accuracies = {a[0], a[1], a[2]};
        spec.n_questions = opt.n_questions;
        spec.n_answers = 10;
        spec.regime = regime == 0 ? WrongAnswerRegime::kDisjointPerModel
                                  : WrongAnswerRegime::kSharedPool;
        spec.seed = Rng::derive(trial_seed(opt.seed, fp, t), kStreamGenerate);
        LabeledTable data = generate(spec);
        auto worst = worst_of_triplet({"M1", "M2", "M3"}, data.table,
                                      ScorerSpec::parse("exact"));
        if (worst && *worst == "M3") ++hits;
        if (regime == 1)
          m_sum += measure_overlap_m(data.table, data.truth, "M1", "M2");
      }
      double freq =
          static_cast<double>(hits) / static_cast<double>(opt.trials);
      if (regime == 0) {
        row.freq_disjoint = freq;
      } else {
        row.freq_shared = freq;
        row.mean_m_shared = m_sum / static_cast<double>(opt.trials);
        double m = std::min(row.mean_m_shared, 1.0);
        row.thm_at_m = thm1_holds(a[0], a[1], a[2], m);
      }
    }
  });

  std::ostringstream out, text;
  out << "a_i,a_j,a_k,lemma1,unsatisfiable,freq_disjoint,freq_shared,"
         "mean_m_shared,thm1_at_mean_m\n";
  std::size_t lemma_cells = 0, lemma_pass = 0;
  for (const auto& row : rows) {
    out << fmt_double(row.a[0]) << "," << fmt_double(row.a[1]) << ","
        << fmt_double(row.a[2]) << "," << (row.lemma ? 1 : 0) << ","
        << (row.unsat ? 1 : 0) << "," << fmt_double(row.freq_disjoint) << ","
        << fmt_double(row.freq_shared) << "," << fmt_double(row.mean_m_shared)
        << "," << (row.thm_at_m ? 1 : 0) << "\n";
    if (row.lemma) {
      ++lemma_cells;
      if (row.freq_disjoint >= 0.99) ++lemma_pass;
    }
  }
  text << "triples: " << rows.size() << "\n"
       << "condition-true cells: " << lemma_cells << "\n"
       << "condition-true cells at disjoint frequency >= 0.99: " << lemma_pass
       << "\n";

  write_text_file(join_path(opt.out_dir, "theory.csv"), out.str());
  write_text_file(join_path(opt.out_dir, "summary.txt"), text.str());
  std::cout << text.str();
  return 0;
}

int run_tensor_export(const TensorExportOptions& opt) {
  ScorerSpec scorer =
      ScorerSpec::parse(opt.scorer, Rng::derive(opt.seed, kStreamScorer));
  if (opt.out_path.empty())
    throw Error(ErrorKind::kInvalidParams, "output path not set");
  LoadedDataset data = load_dataset(opt.data_path);
  std::uint64_t evals = 0;
  TripletTensor tensor = build_tensor(data.table, scorer, opt.workers, &evals);
  write_text_file(opt.out_path, tensor.to_csv());
  std::cerr << "tensor written after " << evals << " evaluations\n";
  return 0;
}

int run_judge(const JudgeOptions& opt) {
  ensure_dir(opt.out_dir);
  LoadedDataset data = load_dataset(opt.data_path);
  std::optional<ReferenceSet> refs = std::move(data.references);
  if (!opt.refs_path.empty()) refs = load_references(opt.refs_path);

  std::map<PromptId, std::string> prompt_texts;
  if (!opt.prompts_path.empty()) {
    std::string content = read_text_file(opt.prompts_path);
    for (auto line : split_lines(content)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("prompt_id") ||
          !j.contains("text"))
        throw Error(ErrorKind::kParseError,
                    "prompts file lines need prompt_id and text");
      prompt_texts[j["prompt_id"].get<std::string>()] =
          j["text"].get<std::string>();
    }
  }

  JudgeEndpointConfig config;
  config.url = opt.url;
  config.token = opt.token;
  config.response_field = opt.response_field;
  config.temperature = opt.temperature;
  config.max_tokens = opt.max_tokens;
  config.timeout_s = opt.timeout_s;
  config.max_retries = opt.max_retries;
  config.max_in_flight = opt.max_in_flight;
  config.rubric = opt.rubric;

  HttpJudgeTransport transport(config);
  Rng rng(opt.seed);
  JudgeRankResult result = judge_rank(
      data.table, config, opt.sample_size, rng, transport, opt.cache_path,
      prompt_texts.empty() ? nullptr : &prompt_texts);

  write_text_file(join_path(opt.out_dir, "ranking_judge.csv"),
                  ranking_csv(result.ranking));

  std::ostringstream summary;
  summary << "judged comparisons: " << result.judgements.size() << " ("
          << result.from_cache << " from cache, " << result.unparseable
          << " unparseable)\n";
  summary << "judge ranking:";
  for (const auto& m : result.ranking.ranking) summary << " " << m;
  summary << "\n";

  if (refs) {
    auto truth_scorer = ScorerSpec::parse("rouge2-word").instance(0);
    ScoredRanking truth = true_ranking(data.table, *refs, *truth_scorer);
    TrialMetrics m = score_ranking(result.ranking.ranking, truth.ranking,
                                   opt.rbo_p, opt.map_ks, 0);
    std::ostringstream q;
    q << quality_header(opt.map_ks) << "\n"
      << quality_row("judge", m, opt.map_ks) << "\n";
    write_text_file(join_path(opt.out_dir, "quality.csv"), q.str());
    summary << "rbo vs true ranking: " << fmt_double(m.rbo) << "\n";
  }

  write_text_file(join_path(opt.out_dir, "judge_summary.txt"), summary.str());
  std::cout << summary.str();
  return 0;
}

}  // namespace trirank
