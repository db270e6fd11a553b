#include "trirank/rankers.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "trirank/io_util.hpp"

namespace trirank {
namespace {

// Stable sort of model indices by score descending; equal scores keep input
// order.
std::vector<std::size_t> order_desc(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return idx;
}

ScoredRanking rank_by_scores(const std::vector<ModelId>& models,
                             const std::vector<double>& scores) {
  ScoredRanking out;
  for (std::size_t i : order_desc(scores)) {
    out.ranking.push_back(models[i]);
    out.scores.push_back(scores[i]);
  }
  return out;
}

}  // namespace

GtrResult gtr(const ResponseTable& table, const ScorerSpec& scorer, Rng& rng) {
  std::size_t n = table.n_models();
  if (n < 3) throw Error(ErrorKind::kTooFewModels, "need at least 3 models");
  require_valid(table);

  PreparedTable prepared(table, *scorer.instance(0));
  const std::vector<ModelId>& ids = table.models();
  GtrResult res;
  GtrTrace& trace = res.trace;

  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<std::size_t> ranked;

  // One judged pair: the current best model compares the two, the strict
  // loser goes second. A tied verdict keeps the pair's current order.
  auto resolve_pair = [&](std::size_t judge, std::size_t a, std::size_t b) {
    auto s = scorer.instance(trace.evaluations);
    PairVerdict v = pairwise_verdict_at(prepared, judge, a, b, *s);
    ++trace.evaluations;
    ++trace.pair_resolutions;
    std::size_t winner = v.wins_i < v.wins_j ? b : a;
    std::size_t loser = winner == a ? b : a;
    trace.events.push_back({GtrEvent::Kind::kPairResolve,
                            {ids[judge], ids[a], ids[b]},
                            ids[loser],
                            false});
    ranked.push_back(winner);
    ranked.push_back(loser);
  };

  while (pool.size() >= 3) {
    // T starts as the first three of the remaining pool; each round of the
    // sweep votes, ejects one model and pulls in the next. The ejected stay
    // in the pool for the following sweep.
    std::vector<std::size_t> t = {pool[0], pool[1], pool[2]};
    std::size_t consumed = 3;
    for (;;) {
      auto worst = worst_of_triplet_at(prepared, {t[0], t[1], t[2]}, scorer,
                                       trace.evaluations);
      trace.evaluations += 3;
      ++trace.votes;
      // No consensus ejects the most recently added model, t.back().
      std::size_t victim = worst ? *worst : t[2];
      trace.events.push_back({GtrEvent::Kind::kVote,
                              {ids[t[0]], ids[t[1]], ids[t[2]]},
                              ids[victim],
                              worst.has_value()});
      t.erase(std::find(t.begin(), t.end(), victim));
      if (consumed == pool.size()) break;
      t.push_back(pool[consumed++]);
    }

    // The two survivors leave the pool; everyone ejected this sweep stays.
    std::vector<std::size_t> rest;
    for (std::size_t m : pool)
      if (m != t[0] && m != t[1]) rest.push_back(m);
    pool = std::move(rest);

    if (ranked.empty()) {
      std::size_t first = t[rng.below(2)];
      std::size_t second = first == t[0] ? t[1] : t[0];
      trace.events.push_back({GtrEvent::Kind::kCoin,
                              {ids[t[0]], ids[t[1]]},
                              ids[second],
                              false});
      ranked.push_back(first);
      ranked.push_back(second);
    } else {
      resolve_pair(ranked[0], t[0], t[1]);
    }
  }

  if (pool.size() == 1) {
    trace.events.push_back(
        {GtrEvent::Kind::kAppendSingle, {ids[pool[0]]}, ids[pool[0]], false});
    ranked.push_back(pool[0]);
  } else if (pool.size() == 2) {
    resolve_pair(ranked[0], pool[0], pool[1]);
  }

  for (std::size_t m : ranked) res.ranking.push_back(ids[m]);
  return res;
}

namespace {

FtrResult ftr_iterate(const TripletTensor& tensor, double epsilon,
                      std::size_t max_iter, std::uint64_t evaluations) {
  if (!(epsilon > 0.0))
    throw Error(ErrorKind::kInvalidParams, "epsilon must be positive");
  if (max_iter < 1)
    throw Error(ErrorKind::kInvalidParams, "max_iter must be at least 1");

  std::size_t n = tensor.n_models();
  FtrResult res;
  res.models = tensor.models();
  res.evaluations = evaluations;

  std::vector<double> r(n, 1.0);
  std::vector<double> m(n * n, 0.0);
  std::vector<double> rp(n, 0.0);
  while (res.iterations < max_iter) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          acc += tensor.y(i, j, k) * r[k];
        }
        m[i * n + j] = acc / static_cast<double>(n);
      }
    // z_ij uses >=, so a tied pair credits both sides.
    for (std::size_t i = 0; i < n; ++i) {
      double wins = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (m[i * n + j] >= m[j * n + i]) wins += 1.0;
      }
      rp[i] = wins / static_cast<double>(n - 1);
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta += std::abs(r[i] - rp[i]);
    res.delta_log.push_back(delta);
    ++res.iterations;
    r = rp;
    if (delta <= epsilon) {
      res.converged = true;
      break;
    }
  }

  res.reputation = r;
  ScoredRanking ranked = rank_by_scores(res.models, r);
  res.ranking = std::move(ranked.ranking);
  return res;
}

}  // namespace

FtrResult ftr(const ResponseTable& table, const ScorerSpec& scorer,
              double epsilon, std::size_t max_iter, int workers) {
  std::uint64_t evals = 0;
  TripletTensor tensor = build_tensor(table, scorer, workers, &evals);
  return ftr_iterate(tensor, epsilon, max_iter, evals);
}

FtrResult ftr_from_tensor(const TripletTensor& tensor, double epsilon,
                          std::size_t max_iter) {
  return ftr_iterate(tensor, epsilon, max_iter, 0);
}

ScoredRanking mca_multiple_choice(const ResponseTable& table,
                                  Scorer* agreement) {
  require_valid(table);
  std::size_t n = table.n_models();
  std::size_t q = table.n_prompts();

  std::vector<std::string> pseudo(q);
  for (std::size_t p = 0; p < q; ++p) {
    std::map<std::string, std::size_t> counts;
    for (std::size_t m = 0; m < n; ++m)
      ++counts[std::string(trim_ws(table.at(m, p)))];
    // Modal response; the map iterates keys in order, so on equal counts the
    // lexicographically smallest key sticks.
    std::size_t best = 0;
    for (const auto& [resp, c] : counts)
      if (c > best) {
        best = c;
        pseudo[p] = resp;
      }
  }

  std::vector<double> scores(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    double acc = 0.0;
    for (std::size_t p = 0; p < q; ++p) {
      if (agreement)
        acc += agreement->score(agreement->prepare(table.at(m, p)),
                                agreement->prepare(pseudo[p]));
      else
        acc += trim_ws(table.at(m, p)) == pseudo[p] ? 1.0 : 0.0;
    }
    scores[m] = acc / static_cast<double>(q);
  }
  return rank_by_scores(table.models(), scores);
}

ScoredRanking mca_generative(const ResponseTable& table, std::size_t top_k,
                             BigramMode mode) {
  if (top_k < 1)
    throw Error(ErrorKind::kInvalidParams, "top_k must be at least 1");
  require_valid(table);
  std::size_t n = table.n_models();
  std::size_t q = table.n_prompts();

  std::vector<double> scores(n, 0.0);
  for (std::size_t p = 0; p < q; ++p) {
    std::vector<std::map<std::string, int>> per_model(n);
    std::map<std::string, long long> pooled;
    for (std::size_t m = 0; m < n; ++m) {
      per_model[m] = bigrams(table.at(m, p), mode);
      for (const auto& [k, c] : per_model[m]) pooled[k] += c;
    }
    // Keep the top_k pooled bigrams with their counts: count descending,
    // lexicographically smaller key first on equal counts.
    std::vector<std::pair<std::string, long long>> top(pooled.begin(),
                                                       pooled.end());
    std::stable_sort(top.begin(), top.end(), [](const auto& a, const auto& b) {
      return a.second > b.second;
    });
    if (top.size() > top_k) top.resize(top_k);
    std::map<std::string, long long> ref(top.begin(), top.end());
    long long ref_total = 0;
    for (const auto& [k, c] : ref) ref_total += c;

    for (std::size_t m = 0; m < n; ++m) {
      long long cand_total = 0;
      long long overlap = 0;
      for (const auto& [k, c] : per_model[m]) {
        cand_total += c;
        auto it = ref.find(k);
        if (it != ref.end()) overlap += std::min<long long>(c, it->second);
      }
      if (cand_total > 0 && ref_total > 0 && overlap > 0) {
        double prec = static_cast<double>(overlap) / cand_total;
        double rec = static_cast<double>(overlap) / ref_total;
        scores[m] += 2.0 * prec * rec / (prec + rec);
      }
    }
  }
  for (double& s : scores) s /= static_cast<double>(q);
  return rank_by_scores(table.models(), scores);
}

ScoredRanking true_ranking(const ResponseTable& table, const ReferenceSet& refs,
                           Scorer& scorer) {
  require_valid(table);
  for (const auto& p : table.prompts())
    if (!refs.has(p))
      throw Error(ErrorKind::kMissingReference, "no reference for prompt: " + p);

  std::size_t n = table.n_models();
  std::size_t q = table.n_prompts();
  std::vector<PreparedText> ref_prep;
  ref_prep.reserve(q);
  for (const auto& p : table.prompts())
    ref_prep.push_back(scorer.prepare(refs.reference(p)));

  std::vector<double> scores(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    double acc = 0.0;
    for (std::size_t p = 0; p < q; ++p)
      acc += scorer.score(ref_prep[p], scorer.prepare(table.at(m, p)));
    scores[m] = acc / static_cast<double>(q);
  }
  return rank_by_scores(table.models(), scores);
}

std::string ranking_csv(const ScoredRanking& r) {
  std::ostringstream out;
  out << "rank,model_id,score\n";
  for (std::size_t i = 0; i < r.ranking.size(); ++i) {
    out << (i + 1) << "," << csv_escape(r.ranking[i]) << ",";
    if (i < r.scores.size()) out << fmt_double(r.scores[i]);
    out << "\n";
  }
  return out.str();
}

std::string ranking_csv(const Ranking& r) {
  return ranking_csv(ScoredRanking{r, {}});
}

std::string delta_csv(const FtrResult& r) {
  std::ostringstream out;
  out << "iteration,delta\n";
  for (std::size_t i = 0; i < r.delta_log.size(); ++i)
    out << (i + 1) << "," << fmt_double(r.delta_log[i]) << "\n";
  return out.str();
}

}  // namespace trirank
