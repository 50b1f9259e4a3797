#pragma once

#include <optional>
#include <string>
#include <vector>

#include "funcmod/dataset.hpp"
#include "funcmod/transforms.hpp"

namespace funcmod {

struct PromptBundle {
    std::string task_text;
    std::optional<std::string> hint;
    std::vector<std::string> incontext_lines; // rendered in dataset order, 1-indexed
    std::string query_text;
    std::string answer_format_clause;
    EvalMode mode = EvalMode::LikelihoodOnly;

    // Pure assembly; same bundle -> byte-identical text.
    std::string full_text() const;
};

// Renders the two prompt layouts. Likelihood mode expects anonymized numeric
// data ("example i, features: [...], class c"); posterior mode expects
// semantic data plus a context-bearing task ("case i, name=value, ..., <label>").
// A mismatch between mode and dataset form raises ModeViolation.
PromptBundle build_prompt(EvalMode mode, const TabularDataset& dataset,
                          const TaskDescription& task, const Example& query);

// Numeric rendering for anonymized feature vectors: two decimals with
// trailing zeros trimmed down to one decimal place ("1.0", "0.4", "0.33").
std::string format_feature01(double v);

// Prompt asking for the top-k feature names, mode-consistent naming.
std::string build_selection_prompt(const TabularDataset& dataset, size_t k,
                                   const TaskDescription& task);

// Follow-up prompt asking the model to enumerate its prediction rules.
std::string build_rules_prompt(const PromptBundle& reference);

} // namespace funcmod
