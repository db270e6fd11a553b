#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trirank {

using ModelId = std::string;
using PromptId = std::string;

// Best first. Ties between equal scores keep input order.
using Ranking = std::vector<ModelId>;

enum class ErrorKind {
  kEmptyModelSet,
  kEmptyPromptSet,
  kDuplicateModel,
  kDuplicatePrompt,
  kMissingCell,
  kUnknownModel,
  kUnknownPrompt,
  kNonDistinctModels,
  kTooFewModels,
  kInvalidProbability,
  kOrderingViolated,
  kInvalidSpec,
  kInvalidParams,
  kNotConjoint,
  kMissingReference,
  kDuplicateRecord,
  kParseError,
  kIoError,
  kEndpointError,
};

struct Error : std::runtime_error {
  Error(ErrorKind k, const std::string& what)
      : std::runtime_error(what), kind(k) {}
  ErrorKind kind;
};

// Complete grid of responses, one per (model, prompt). Model and prompt
// orders are insertion orders and are preserved by every operation; ranking
// tie-breaks and serialization depend on them.
class ResponseTable {
 public:
  ResponseTable() = default;
  ResponseTable(std::vector<ModelId> models, std::vector<PromptId> prompts);

  void add_model(const ModelId& id);
  void add_prompt(const PromptId& id);

  void set(const ModelId& model, const PromptId& prompt, std::string response);
  void set_at(std::size_t model, std::size_t prompt, std::string response);

  const std::string& response(const ModelId& model, const PromptId& prompt) const;
  const std::string& at(std::size_t model, std::size_t prompt) const;
  bool filled(std::size_t model, std::size_t prompt) const;

  const std::vector<ModelId>& models() const { return models_; }
  const std::vector<PromptId>& prompts() const { return prompts_; }
  std::size_t n_models() const { return models_.size(); }
  std::size_t n_prompts() const { return prompts_.size(); }

  bool has_model(const ModelId& id) const;
  bool has_prompt(const PromptId& id) const;
  std::size_t model_index(const ModelId& id) const;
  std::size_t prompt_index(const PromptId& id) const;

 private:
  std::vector<ModelId> models_;
  std::vector<PromptId> prompts_;
  std::map<ModelId, std::size_t> model_idx_;
  std::map<PromptId, std::size_t> prompt_idx_;
  std::vector<std::string> cells_;  // row-major, model * n_prompts + prompt
  std::vector<char> filled_;
};

struct TableValidation {
  bool empty_model_set = false;
  bool empty_prompt_set = false;
  std::vector<ModelId> duplicate_models;
  std::vector<PromptId> duplicate_prompts;
  std::vector<std::pair<ModelId, PromptId>> missing_cells;

  bool ok() const;
  std::string summary() const;  // one issue per line, empty when ok
};

TableValidation validate_table(const ResponseTable& table);

// Throws Error describing the first problem found.
void require_valid(const ResponseTable& table);

// New table restricted to the given models, in the given order. Ids must be
// distinct and present.
ResponseTable subset_models(const ResponseTable& table,
                            const std::vector<ModelId>& models);

// New table restricted to the given prompts, in the given order.
ResponseTable subset_prompts(const ResponseTable& table,
                             const std::vector<PromptId>& prompts);

// Ground truth answers keyed by prompt, insertion ordered.
class ReferenceSet {
 public:
  void set(const PromptId& prompt, std::string reference);
  bool has(const PromptId& prompt) const;
  const std::string& reference(const PromptId& prompt) const;
  const std::vector<PromptId>& prompts() const { return order_; }
  std::size_t size() const { return order_.size(); }

  // True when every prompt of the table has a reference.
  bool covers(const ResponseTable& table) const;

 private:
  std::vector<PromptId> order_;
  std::map<PromptId, std::string> refs_;
};

}  // namespace trirank
