#include "trirank/triplet.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "trirank/io_util.hpp"

namespace trirank {

double y_value(const PairVerdict& v) {
  if (v.wins_i > v.wins_j) return 1.0;
  if (v.wins_i < v.wins_j) return 0.0;
  return 0.5;
}

PreparedTable::PreparedTable(const ResponseTable& table, const Scorer& scorer)
    : n_models_(table.n_models()), n_prompts_(table.n_prompts()) {
  cells_.reserve(n_models_ * n_prompts_);
  for (std::size_t m = 0; m < n_models_; ++m)
    for (std::size_t p = 0; p < n_prompts_; ++p)
      cells_.push_back(scorer.prepare(table.at(m, p)));
}

PairVerdict pairwise_verdict_at(const PreparedTable& prepared,
                                std::size_t judge, std::size_t i,
                                std::size_t j, Scorer& scorer) {
  if (judge == i || judge == j || i == j)
    throw Error(ErrorKind::kNonDistinctModels,
                "judge and candidates must be distinct");
  PairVerdict v;
  for (std::size_t p = 0; p < prepared.n_prompts(); ++p) {
    double si = scorer.score(prepared.at(judge, p), prepared.at(i, p));
    double sj = scorer.score(prepared.at(judge, p), prepared.at(j, p));
    if (si > sj)
      ++v.wins_i;
    else if (sj > si)
      ++v.wins_j;
    else
      ++v.ties;
  }
  return v;
}

PairVerdict pairwise_verdict(const ModelId& judge, const ModelId& i,
                             const ModelId& j, const ResponseTable& table,
                             Scorer& scorer) {
  std::size_t jm = table.model_index(judge);
  std::size_t im = table.model_index(i);
  std::size_t jj = table.model_index(j);
  if (jm == im || jm == jj || im == jj)
    throw Error(ErrorKind::kNonDistinctModels,
                "judge and candidates must be distinct");
  require_valid(table);
  PairVerdict v;
  for (std::size_t p = 0; p < table.n_prompts(); ++p) {
    PreparedText pj = scorer.prepare(table.at(jm, p));
    double si = scorer.score(pj, scorer.prepare(table.at(im, p)));
    double sj = scorer.score(pj, scorer.prepare(table.at(jj, p)));
    if (si > sj)
      ++v.wins_i;
    else if (sj > si)
      ++v.wins_j;
    else
      ++v.ties;
  }
  return v;
}

namespace {

// -1 tie, 0 first candidate lost, 1 second candidate lost.
int strict_loser(const PairVerdict& v) {
  if (v.wins_i < v.wins_j) return 0;
  if (v.wins_j < v.wins_i) return 1;
  return -1;
}

}  // namespace

std::optional<std::size_t> worst_of_triplet_at(const PreparedTable& prepared,
                                               const std::array<std::size_t, 3>& t,
                                               const ScorerSpec& scorer,
                                               std::uint64_t stream_base) {
  // Verdict v: judge t[v] compares the remaining two in position order.
  auto verdict = [&](std::size_t v, std::size_t a, std::size_t b) {
    auto s = scorer.instance(stream_base + v);
    return pairwise_verdict_at(prepared, t[v], t[a], t[b], *s);
  };
  PairVerdict v0 = verdict(0, 1, 2);
  PairVerdict v1 = verdict(1, 0, 2);
  PairVerdict v2 = verdict(2, 0, 1);
  // t[0] is judged in v1 (first slot) and v2 (first slot), and so on.
  if (strict_loser(v1) == 0 && strict_loser(v2) == 0) return t[0];
  if (strict_loser(v0) == 0 && strict_loser(v2) == 1) return t[1];
  if (strict_loser(v0) == 1 && strict_loser(v1) == 1) return t[2];
  return std::nullopt;
}

std::optional<ModelId> worst_of_triplet(const std::array<ModelId, 3>& t,
                                        const ResponseTable& table,
                                        const ScorerSpec& scorer) {
  ResponseTable sub = subset_models(table, {t[0], t[1], t[2]});
  require_valid(sub);
  PreparedTable prepared(sub, *scorer.instance(0));
  auto worst = worst_of_triplet_at(prepared, {0, 1, 2}, scorer, 0);
  if (!worst) return std::nullopt;
  return t[*worst];
}

TripletTensor::TripletTensor(std::vector<ModelId> models)
    : models_(std::move(models)) {
  std::size_t n = models_.size();
  if (n < 3)
    throw Error(ErrorKind::kTooFewModels, "tensor needs at least 3 models");
  values_.assign(n * (n - 1) / 2 * (n - 2),
                 std::numeric_limits<double>::quiet_NaN());
}

std::size_t TripletTensor::slot(std::size_t i, std::size_t j,
                                std::size_t k) const {
  std::size_t n = models_.size();
  if (i >= n || j >= n || k >= n || i == j || k == i || k == j)
    throw Error(ErrorKind::kInvalidParams, "bad tensor index");
  std::size_t pair = i * (2 * n - i - 1) / 2 + (j - i - 1);
  std::size_t judge = k - (k > i ? 1 : 0) - (k > j ? 1 : 0);
  return pair * (n - 2) + judge;
}

void TripletTensor::set(std::size_t i, std::size_t j, std::size_t k, double y) {
  if (y != 0.0 && y != 0.5 && y != 1.0)
    throw Error(ErrorKind::kInvalidParams, "y must be 0, 0.5 or 1");
  if (i < j)
    values_[slot(i, j, k)] = y;
  else
    values_[slot(j, i, k)] = 1.0 - y;
}

double TripletTensor::y(std::size_t i, std::size_t j, std::size_t k) const {
  double v = i < j ? values_[slot(i, j, k)] : 1.0 - values_[slot(j, i, k)];
  if (std::isnan(v))
    throw Error(ErrorKind::kInvalidParams, "tensor entry never evaluated");
  return v;
}

std::string TripletTensor::to_csv() const {
  std::ostringstream out;
  out << "models";
  for (const auto& m : models_) out << "," << csv_escape(m);
  out << "\ni,j,k,y\n";
  std::size_t n = models_.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        out << i << "," << j << "," << k << "," << fmt_double(y(i, j, k))
            << "\n";
      }
  return out.str();
}

TripletTensor TripletTensor::from_csv(const std::string& content) {
  auto rows = parse_csv(content);
  if (rows.size() < 2 || rows[0].empty() || rows[0][0] != "models")
    throw Error(ErrorKind::kParseError, "tensor CSV missing models header");
  std::vector<ModelId> models(rows[0].begin() + 1, rows[0].end());
  TripletTensor tensor(std::move(models));
  if (rows[1] != std::vector<std::string>{"i", "j", "k", "y"})
    throw Error(ErrorKind::kParseError, "tensor CSV missing i,j,k,y header");
  for (std::size_t r = 2; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 4)
      throw Error(ErrorKind::kParseError, "tensor CSV row needs 4 cells");
    auto parse_idx = [](const std::string& s) {
      std::size_t v{};
      auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || end != s.data() + s.size())
        throw Error(ErrorKind::kParseError, "bad tensor index: " + s);
      return v;
    };
    double y{};
    {
      const std::string& s = row[3];
      auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), y);
      if (ec != std::errc{} || end != s.data() + s.size())
        throw Error(ErrorKind::kParseError, "bad y value: " + s);
    }
    tensor.set(parse_idx(row[0]), parse_idx(row[1]), parse_idx(row[2]), y);
  }
  return tensor;
}

TripletTensor build_tensor(const ResponseTable& table, const ScorerSpec& scorer,
                           int workers, std::uint64_t* eval_count) {
  std::size_t n = table.n_models();
  if (n < 3)
    throw Error(ErrorKind::kTooFewModels, "need at least 3 models");
  require_valid(table);

  PreparedTable prepared(table, *scorer.instance(0));
  TripletTensor tensor(table.models());

  // Stable task list: pairs in index order, judges ascending.
  struct Task {
    std::size_t i, j, k;
    std::uint64_t stream;
  };
  std::vector<Task> tasks;
  tasks.reserve(n * (n - 1) / 2 * (n - 2));
  std::uint64_t stream = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        tasks.push_back({i, j, k, stream++});
      }

  auto run = [&](std::size_t begin, std::size_t step) {
    for (std::size_t t = begin; t < tasks.size(); t += step) {
      const Task& task = tasks[t];
      auto s = scorer.instance(task.stream);
      PairVerdict v = pairwise_verdict_at(prepared, task.k, task.i, task.j, *s);
      tensor.set(task.i, task.j, task.k, y_value(v));
    }
  };

  int w = workers;
  if (w < 1) w = 1;
  if (static_cast<std::size_t>(w) > tasks.size())
    w = static_cast<int>(tasks.size());
  if (w <= 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (int t = 0; t < w; ++t)
      pool.emplace_back(run, static_cast<std::size_t>(t),
                        static_cast<std::size_t>(w));
    for (auto& th : pool) th.join();
  }

  if (eval_count) *eval_count += tasks.size();
  return tensor;
}

}  // namespace trirank
