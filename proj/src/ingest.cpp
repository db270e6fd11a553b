#include "trirank/ingest.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "trirank/io_util.hpp"

namespace trirank {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string field(const json& j, const char* name, std::size_t line) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string())
    throw Error(ErrorKind::kParseError,
                "line " + std::to_string(line) + ": missing string field '" +
                    name + "'");
  return it->get<std::string>();
}

ResponseTable table_from_records(const std::vector<ResponseRecord>& records) {
  ResponseTable table;
  std::set<std::pair<PromptId, ModelId>> seen;
  for (const auto& r : records) {
    if (!seen.emplace(r.prompt_id, r.model_id).second)
      throw Error(ErrorKind::kDuplicateRecord,
                  "repeated (prompt, model): (" + r.prompt_id + ", " +
                      r.model_id + ")");
    if (!table.has_model(r.model_id)) table.add_model(r.model_id);
    if (!table.has_prompt(r.prompt_id)) table.add_prompt(r.prompt_id);
    table.set(r.model_id, r.prompt_id, r.response);
  }
  require_valid(table);
  return table;
}

LoadedDataset load_jsonl(const std::string& content) {
  std::vector<ResponseRecord> records;
  auto lines = split_lines(content);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    json j = json::parse(lines[ln], nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw Error(ErrorKind::kParseError,
                  "line " + std::to_string(ln + 1) + ": not a JSON object");
    records.push_back({field(j, "prompt_id", ln + 1),
                       field(j, "model_id", ln + 1),
                       field(j, "response", ln + 1)});
  }
  return {table_from_records(records), std::nullopt};
}

LoadedDataset load_csv(const std::string& content) {
  auto rows = parse_csv(content);
  if (rows.empty() || rows[0].size() < 2)
    throw Error(ErrorKind::kParseError, "CSV needs a header with columns");
  const auto& header = rows[0];

  std::optional<std::size_t> gt_col;
  std::vector<std::pair<std::size_t, ModelId>> model_cols;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c] == "GT")
      gt_col = c;
    else
      model_cols.emplace_back(c, header[c]);
  }
  if (model_cols.empty())
    throw Error(ErrorKind::kParseError, "CSV has no model columns");

  LoadedDataset out;
  for (const auto& [c, id] : model_cols) out.table.add_model(id);
  if (gt_col) out.references.emplace();

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw Error(ErrorKind::kParseError,
                  "row " + std::to_string(r + 1) + ": expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(row.size()));
    const PromptId& prompt = row[0];
    if (out.table.has_prompt(prompt))
      throw Error(ErrorKind::kDuplicateRecord, "repeated prompt row: " + prompt);
    out.table.add_prompt(prompt);
    if (gt_col) out.references->set(prompt, row[*gt_col]);
    for (const auto& [c, id] : model_cols)
      out.table.set(id, prompt, row[c]);
  }
  require_valid(out.table);
  return out;
}

}  // namespace

LoadedDataset load_dataset(const std::string& path, DatasetFormat format) {
  std::string content = read_text_file(path);
  return format == DatasetFormat::kJsonl ? load_jsonl(content)
                                         : load_csv(content);
}

LoadedDataset load_dataset(const std::string& path) {
  std::string_view p = path;
  if (p.size() > 3 && p.substr(p.size() - 3) == ".gz")
    p.remove_suffix(3);
  if (p.size() > 4 && p.substr(p.size() - 4) == ".csv")
    return load_dataset(path, DatasetFormat::kCsv);
  if (p.size() > 6 && p.substr(p.size() - 6) == ".jsonl")
    return load_dataset(path, DatasetFormat::kJsonl);
  throw Error(ErrorKind::kInvalidParams,
              "cannot infer format from extension: " + path);
}

ResponseTable load_responses(const std::string& path, DatasetFormat format) {
  return load_dataset(path, format).table;
}

ReferenceSet load_references(const std::string& path) {
  std::string content = read_text_file(path);
  ReferenceSet refs;
  auto lines = split_lines(content);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    json j = json::parse(lines[ln], nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw Error(ErrorKind::kParseError,
                  "line " + std::to_string(ln + 1) + ": not a JSON object");
    refs.set(field(j, "prompt_id", ln + 1), field(j, "reference", ln + 1));
  }
  return refs;
}

std::string dataset_to_jsonl(const ResponseTable& table) {
  std::ostringstream out;
  for (const auto& p : table.prompts())
    for (const auto& m : table.models()) {
      ordered_json j;
      j["prompt_id"] = p;
      j["model_id"] = m;
      j["response"] = table.response(m, p);
      out << j.dump() << "\n";
    }
  return out.str();
}

std::string dataset_to_csv(const ResponseTable& table,
                           const ReferenceSet* references) {
  std::ostringstream out;
  if (references) out << ",GT";
  for (const auto& m : table.models()) out << "," << csv_escape(m);
  out << "\n";
  for (const auto& p : table.prompts()) {
    out << csv_escape(p);
    if (references) out << "," << csv_escape(references->reference(p));
    for (const auto& m : table.models())
      out << "," << csv_escape(table.response(m, p));
    out << "\n";
  }
  return out.str();
}

std::string references_to_jsonl(const ReferenceSet& refs) {
  std::ostringstream out;
  for (const auto& p : refs.prompts()) {
    ordered_json j;
    j["prompt_id"] = p;
    j["reference"] = refs.reference(p);
    out << j.dump() << "\n";
  }
  return out.str();
}

SamplingStrategy SamplingStrategy::parse(const std::string& text,
                                         std::size_t n, std::size_t window) {
  if (text == "random") return random(n);
  if (text == "spread") return spread(n);
  if (text == "close") return close(n, window);
  throw Error(ErrorKind::kInvalidParams, "unknown sampling strategy: " + text);
}

std::vector<ModelId> sample_models(const SamplingStrategy& strategy,
                                   const Ranking& population, Rng& rng) {
  std::size_t big_n = population.size();
  std::size_t n = strategy.n;
  if (n < 1 || n > big_n)
    throw Error(ErrorKind::kInvalidParams,
                "sample size must lie in [1, population size]");

  std::vector<ModelId> out;
  switch (strategy.kind) {
    case SamplingStrategy::Kind::kRandom: {
      std::vector<std::size_t> idx(big_n);
      std::iota(idx.begin(), idx.end(), 0);
      for (std::size_t t = 0; t < n; ++t) {
        std::size_t pick = t + rng.below(big_n - t);
        std::swap(idx[t], idx[pick]);
        out.push_back(population[idx[t]]);
      }
      break;
    }
    case SamplingStrategy::Kind::kSpread: {
      std::size_t step = big_n / n;
      if (step == 0) step = 1;
      double u = rng.next_double() * (static_cast<double>(big_n) /
                                      static_cast<double>(n));
      std::size_t s = static_cast<std::size_t>(u);
      for (std::size_t t = 0; t < n; ++t)
        out.push_back(population[std::min(s + t * step, big_n - 1)]);
      break;
    }
    case SamplingStrategy::Kind::kClose: {
      std::size_t w = strategy.window;
      if (w * 2 >= big_n)
        throw Error(ErrorKind::kInvalidParams,
                    "window must be under half the population");
      if (n > 2 * w + 1)
        throw Error(ErrorKind::kInvalidParams,
                    "sample size exceeds the window width");
      std::size_t s = w + rng.below(big_n - 2 * w);
      std::vector<std::size_t> idx(2 * w + 1);
      std::iota(idx.begin(), idx.end(), s - w);
      for (std::size_t t = 0; t < n; ++t) {
        std::size_t pick = t + rng.below(idx.size() - t);
        std::swap(idx[t], idx[pick]);
        out.push_back(population[idx[t]]);
      }
      break;
    }
  }
  return out;
}

}  // namespace trirank
