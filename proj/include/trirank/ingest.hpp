#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "trirank/core.hpp"
#include "trirank/rng.hpp"

namespace trirank {

struct ResponseRecord {
  PromptId prompt_id;
  ModelId model_id;
  std::string response;
};

struct LoadedDataset {
  ResponseTable table;
  std::optional<ReferenceSet> references;  // CSV GT column, when present
};

enum class DatasetFormat { kJsonl, kCsv };

// JSONL: one {"prompt_id","model_id","response"} object per line. CSV: wide
// layout with a leading prompt-id column, an optional GT column and one
// column per model. Tables come back validated; .gz paths are inflated.
LoadedDataset load_dataset(const std::string& path, DatasetFormat format);

// Format picked by extension (.jsonl/.csv, optionally + .gz).
LoadedDataset load_dataset(const std::string& path);

ResponseTable load_responses(const std::string& path, DatasetFormat format);

// JSONL records {"prompt_id","reference"}.
ReferenceSet load_references(const std::string& path);

// Inverse exports; load -> export -> load round-trips bit-identically.
std::string dataset_to_jsonl(const ResponseTable& table);
std::string dataset_to_csv(const ResponseTable& table,
                           const ReferenceSet* references);
std::string references_to_jsonl(const ReferenceSet& refs);

struct SamplingStrategy {
  enum class Kind { kRandom, kSpread, kClose };
  Kind kind = Kind::kRandom;
  std::size_t n = 0;
  std::size_t window = 0;  // close only

  static SamplingStrategy random(std::size_t n) {
    return {Kind::kRandom, n, 0};
  }
  static SamplingStrategy spread(std::size_t n) {
    return {Kind::kSpread, n, 0};
  }
  static SamplingStrategy close(std::size_t n, std::size_t w) {
    return {Kind::kClose, n, w};
  }

  static SamplingStrategy parse(const std::string& text, std::size_t n,
                                std::size_t window);
};

// Picks n models from a population ordered by true performance.
//   random: uniform subset, in draw order.
//   spread: start uniform in [0, N/n), then every floor(N/n)-th model.
//   close:  window centre uniform over valid positions, n distinct models
//           from the 2w+1 wide window, in draw order.
std::vector<ModelId> sample_models(const SamplingStrategy& strategy,
                                   const Ranking& population, Rng& rng);

}  // namespace trirank
