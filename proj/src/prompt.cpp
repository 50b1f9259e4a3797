#include "funcmod/prompt.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "funcmod/errors.hpp"

namespace funcmod {

namespace {

const char* kSeparator = "-----------------------------------------------------";
const char* kExamplesPreamble =
    "Below are a few examples that you can learn from. Your prediction is based on them.";
const char* kPosteriorClause =
    "In this process, please actively utilize any domain knowledge you know about the task.";

bool anonymous_name(const std::string& name) {
    if (name.rfind("feature ", 0) != 0) return false;
    for (size_t i = 8; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
    return name.size() > 8;
}

bool looks_numerized(const TabularDataset& dataset) {
    for (const auto& fs : dataset.schema)
        if (!anonymous_name(fs.name)) return false;
    return !dataset.schema.empty();
}

std::string likelihood_features(const std::vector<FeatureValue>& values) {
    std::string out = "features: [";
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_feature01(as_number(values[i]));
    }
    out += "]";
    return out;
}

std::string posterior_cells(const TabularDataset& dataset, const std::vector<FeatureValue>& values) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        out += render_cell(dataset.schema[i], values[i]);
    }
    return out;
}

std::string target_phrase(const TabularDataset& dataset, const FeatureValue& target) {
    if (dataset.task_kind() == TaskKind::Classification) return as_text(target);
    bool integral = as_number(target) == std::round(as_number(target));
    return dataset.target_schema.name + "=" + render_number(as_number(target), integral);
}

} // namespace

std::string format_feature01(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s = buf;
    // trim trailing zeros but keep one decimal digit
    while (s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
    return s;
}

std::string PromptBundle::full_text() const {
    std::ostringstream out;
    out << task_text;
    if (hint) out << "\n" << *hint;
    out << "\n";
    if (!incontext_lines.empty()) {
        out << "\n" << kExamplesPreamble << "\n" << kSeparator << "\n";
        for (const auto& line : incontext_lines) out << line << "\n";
        out << kSeparator << "\n";
    }
    out << query_text << "\n";
    out << answer_format_clause << "\n";
    return out.str();
}

PromptBundle build_prompt(EvalMode mode, const TabularDataset& dataset,
                          const TaskDescription& task, const Example& query) {
    if (query.features.size() != dataset.n_features())
        throw InvalidInput("query arity does not match the dataset schema");
    if (task.mode_tag != mode)
        throw ModeViolation("task description is tagged " + to_string(task.mode_tag) +
                            " but the prompt mode is " + to_string(mode));

    PromptBundle bundle;
    bundle.mode = mode;
    TaskKind kind = dataset.task_kind();

    if (mode == EvalMode::LikelihoodOnly) {
        if (task.hint) throw ModeViolation("hint present in likelihood-only mode");
        if (!looks_numerized(dataset))
            throw ModeViolation("likelihood-only prompts need numerized data");
        for (const auto& row : dataset.rows)
            for (const auto& v : row.features)
                if (!is_numeric(v)) throw ModeViolation("verbal feature under likelihood-only mode");
        for (const auto& v : query.features)
            if (!is_numeric(v)) throw ModeViolation("verbal query under likelihood-only mode");

        bundle.task_text = task.text;
        size_t i = 1;
        for (const auto& row : dataset.rows) {
            std::string line = "example " + std::to_string(i++) + ", " +
                               likelihood_features(row.features) + ", ";
            if (kind == TaskKind::Classification) line += "class " + as_text(row.target);
            else line += "y " + format_feature01(as_number(row.target));
            bundle.incontext_lines.push_back(std::move(line));
        }
        std::string what = kind == TaskKind::Classification ? "class" : "y value";
        bundle.query_text = "Now predict the " + what + " for the data below:\n" + "example x, " +
                            likelihood_features(query.features) + ", " +
                            (kind == TaskKind::Classification ? "class=?" : "y=?");
    } else {
        if (looks_numerized(dataset))
            throw ModeViolation("posterior prompts need verbalized data, got anonymized features");
        if (!task.hint || task.hint->empty())
            throw ModeViolation("posterior prompts require the hinting prompt");

        bundle.task_text = task.text + " " + kPosteriorClause;
        bundle.hint = task.hint;
        size_t i = 1;
        for (const auto& row : dataset.rows) {
            bundle.incontext_lines.push_back("case " + std::to_string(i++) + ", " +
                                             posterior_cells(dataset, row.features) + ", " +
                                             target_phrase(dataset, row.target));
        }
        bundle.query_text = "Now predict the " + dataset.target_schema.name +
                            " for the case below:\ncase x, " +
                            posterior_cells(dataset, query.features) + ", " +
                            dataset.target_schema.name + "=?";
    }

    if (kind == TaskKind::Classification) {
        bundle.answer_format_clause =
            "When you are done, give your final answer on the last line in the exact format "
            "'ANSWER: <class>'.";
    } else {
        bundle.answer_format_clause =
            "When you are done, give your final answer on the last line in the exact format "
            "'ANSWER: <number>'.";
    }
    return bundle;
}

std::string build_selection_prompt(const TabularDataset& dataset, size_t k,
                                   const TaskDescription& task) {
    if (k == 0 || k > dataset.n_features())
        throw InvalidInput("k must be between 1 and the feature count");
    std::ostringstream out;
    out << task.text;
    if (task.hint) out << "\n" << *task.hint;
    out << "\n\nThe candidate features are: ";
    for (size_t i = 0; i < dataset.schema.size(); ++i) {
        if (i > 0) out << "; ";
        out << dataset.schema[i].name;
    }
    out << ".\nFrom these candidates, choose the " << k
        << " features that are jointly most informative about the target.\n"
        << "Give your final answer on the last line in the exact format "
           "'ANSWER: <feature>, <feature>, ...'.\n";
    return out.str();
}

std::string build_rules_prompt(const PromptBundle& reference) {
    return reference.full_text() +
           "\nNow list the main rules you used to make these predictions, as a numbered list "
           "with one rule per line.\n";
}

} // namespace funcmod
