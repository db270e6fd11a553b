#include "trirank/core.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace trirank {

ResponseTable::ResponseTable(std::vector<ModelId> models,
                             std::vector<PromptId> prompts) {
  // Prompts first: add_prompt re-lays every existing row for the wider
  // stride, which turns quadratic once models are in place, while add_model
  // only extends the grid.
  for (auto& p : prompts) add_prompt(p);
  for (auto& m : models) add_model(m);
}

void ResponseTable::add_model(const ModelId& id) {
  // Duplicates are representable so that validate_table can report them; the
  // index map keeps the first occurrence.
  models_.push_back(id);
  model_idx_.emplace(id, models_.size() - 1);
  cells_.resize(models_.size() * prompts_.size());
  filled_.resize(models_.size() * prompts_.size(), 0);
}

void ResponseTable::add_prompt(const PromptId& id) {
  prompts_.push_back(id);
  prompt_idx_.emplace(id, prompts_.size() - 1);
  // Re-lay rows for the wider stride.
  std::vector<std::string> cells(models_.size() * prompts_.size());
  std::vector<char> filled(models_.size() * prompts_.size(), 0);
  const std::size_t old_stride = prompts_.size() - 1;
  for (std::size_t m = 0; m < models_.size(); ++m)
    for (std::size_t p = 0; p < old_stride; ++p) {
      cells[m * prompts_.size() + p] = std::move(cells_[m * old_stride + p]);
      filled[m * prompts_.size() + p] = filled_[m * old_stride + p];
    }
  cells_ = std::move(cells);
  filled_ = std::move(filled);
}

void ResponseTable::set(const ModelId& model, const PromptId& prompt,
                        std::string response) {
  set_at(model_index(model), prompt_index(prompt), std::move(response));
}

void ResponseTable::set_at(std::size_t model, std::size_t prompt,
                           std::string response) {
  cells_.at(model * prompts_.size() + prompt) = std::move(response);
  filled_.at(model * prompts_.size() + prompt) = 1;
}

const std::string& ResponseTable::response(const ModelId& model,
                                           const PromptId& prompt) const {
  return at(model_index(model), prompt_index(prompt));
}

const std::string& ResponseTable::at(std::size_t model,
                                     std::size_t prompt) const {
  return cells_.at(model * prompts_.size() + prompt);
}

bool ResponseTable::filled(std::size_t model, std::size_t prompt) const {
  return filled_.at(model * prompts_.size() + prompt) != 0;
}

bool ResponseTable::has_model(const ModelId& id) const {
  return model_idx_.count(id) != 0;
}

bool ResponseTable::has_prompt(const PromptId& id) const {
  return prompt_idx_.count(id) != 0;
}

std::size_t ResponseTable::model_index(const ModelId& id) const {
  auto it = model_idx_.find(id);
  if (it == model_idx_.end())
    throw Error(ErrorKind::kUnknownModel, "unknown model id: " + id);
  return it->second;
}

std::size_t ResponseTable::prompt_index(const PromptId& id) const {
  auto it = prompt_idx_.find(id);
  if (it == prompt_idx_.end())
    throw Error(ErrorKind::kUnknownPrompt, "unknown prompt id: " + id);
  return it->second;
}

bool TableValidation::ok() const {
  return !empty_model_set && !empty_prompt_set && duplicate_models.empty() &&
         duplicate_prompts.empty() && missing_cells.empty();
}

std::string TableValidation::summary() const {
  std::ostringstream out;
  if (empty_model_set) out << "empty model set\n";
  if (empty_prompt_set) out << "empty prompt set\n";
  for (const auto& m : duplicate_models) out << "duplicate model id: " << m << "\n";
  for (const auto& p : duplicate_prompts) out << "duplicate prompt id: " << p << "\n";
  for (const auto& [m, p] : missing_cells)
    out << "missing response: model " << m << ", prompt " << p << "\n";
  return out.str();
}

TableValidation validate_table(const ResponseTable& table) {
  TableValidation v;
  v.empty_model_set = table.n_models() == 0;
  v.empty_prompt_set = table.n_prompts() == 0;

  std::set<ModelId> seen_m;
  for (const auto& m : table.models())
    if (!seen_m.insert(m).second) v.duplicate_models.push_back(m);
  std::set<PromptId> seen_p;
  for (const auto& p : table.prompts())
    if (!seen_p.insert(p).second) v.duplicate_prompts.push_back(p);

  for (std::size_t m = 0; m < table.n_models(); ++m)
    for (std::size_t p = 0; p < table.n_prompts(); ++p)
      if (!table.filled(m, p))
        v.missing_cells.emplace_back(table.models()[m], table.prompts()[p]);
  return v;
}

void require_valid(const ResponseTable& table) {
  TableValidation v = validate_table(table);
  if (v.ok()) return;
  if (v.empty_model_set) throw Error(ErrorKind::kEmptyModelSet, "empty model set");
  if (v.empty_prompt_set) throw Error(ErrorKind::kEmptyPromptSet, "empty prompt set");
  if (!v.duplicate_models.empty())
    throw Error(ErrorKind::kDuplicateModel,
                "duplicate model id: " + v.duplicate_models.front());
  if (!v.duplicate_prompts.empty())
    throw Error(ErrorKind::kDuplicatePrompt,
                "duplicate prompt id: " + v.duplicate_prompts.front());
  throw Error(ErrorKind::kMissingCell,
              "missing response: model " + v.missing_cells.front().first +
                  ", prompt " + v.missing_cells.front().second);
}

ResponseTable subset_models(const ResponseTable& table,
                            const std::vector<ModelId>& models) {
  std::set<ModelId> seen;
  for (const auto& m : models)
    if (!seen.insert(m).second)
      throw Error(ErrorKind::kNonDistinctModels, "repeated model id: " + m);
  ResponseTable out(models, table.prompts());
  for (const auto& m : models) {
    std::size_t src = table.model_index(m);
    std::size_t dst = out.model_index(m);
    for (std::size_t p = 0; p < table.n_prompts(); ++p)
      if (table.filled(src, p)) out.set_at(dst, p, table.at(src, p));
  }
  return out;
}

ResponseTable subset_prompts(const ResponseTable& table,
                             const std::vector<PromptId>& prompts) {
  std::set<PromptId> seen;
  for (const auto& p : prompts)
    if (!seen.insert(p).second)
      throw Error(ErrorKind::kDuplicatePrompt, "repeated prompt id: " + p);
  ResponseTable out(table.models(), prompts);
  for (const auto& p : prompts) {
    std::size_t src = table.prompt_index(p);
    std::size_t dst = out.prompt_index(p);
    for (std::size_t m = 0; m < table.n_models(); ++m)
      if (table.filled(m, src)) out.set_at(m, dst, table.at(m, src));
  }
  return out;
}

void ReferenceSet::set(const PromptId& prompt, std::string reference) {
  auto [it, inserted] = refs_.emplace(prompt, std::move(reference));
  if (!inserted)
    throw Error(ErrorKind::kDuplicatePrompt,
                "duplicate reference for prompt: " + prompt);
  order_.push_back(prompt);
}

bool ReferenceSet::has(const PromptId& prompt) const {
  return refs_.count(prompt) != 0;
}

const std::string& ReferenceSet::reference(const PromptId& prompt) const {
  auto it = refs_.find(prompt);
  if (it == refs_.end())
    throw Error(ErrorKind::kMissingReference,
                "no reference for prompt: " + prompt);
  return it->second;
}

bool ReferenceSet::covers(const ResponseTable& table) const {
  return std::all_of(table.prompts().begin(), table.prompts().end(),
                     [&](const PromptId& p) { return has(p); });
}

}  // namespace trirank
