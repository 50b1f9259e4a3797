#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "funcmod/dataset.hpp"

namespace funcmod {

struct TaskDescription {
    std::string text;
    EvalMode mode_tag = EvalMode::PosteriorFull;
    TaskKind kind = TaskKind::Classification;
    std::optional<std::string> hint;
};

// Domain words that must never appear in a likelihood-only prompt:
// feature names, units, the domain name, and data-source words.
// Matching is case-insensitive on word boundaries.
class Blocklist {
public:
    static Blocklist for_dataset(const TabularDataset& dataset);
    static Blocklist for_series(const SeriesDataset& series);

    void add(const std::string& word);
    const std::vector<std::string>& words() const { return words_; }
    std::vector<std::string> hits(const std::string& text) const;
    bool clean(const std::string& text) const { return hits(text).empty(); }

private:
    std::vector<std::string> words_;
};

struct NoiseSpec {
    enum class Dist { UniformInt, Gaussian };
    Dist dist = Dist::Gaussian;
    // UniformInt: [a, b] inclusive; Gaussian: mean a, sd b.
    double a = 0;
    double b = 0;
    double clamp_lo = -1e308;
    double clamp_hi = 1e308;
    bool multiplicative = false;
};

struct ScaleChange {
    double factor = 1.0;
    std::string new_name;
    std::string new_unit;
};

struct MergeSpec {
    std::vector<std::string> inputs;
    std::string output;
    enum class Combiner { Difference, Sum } combiner = Combiner::Difference;
    std::string output_description; // context explanation for the merged feature
};

struct Binarization {
    // levels mapped to the positive side; everything else goes negative
    std::vector<std::string> positive_levels;
    std::string positive_name = "yes";
    std::string negative_name = "no";
};

struct PerturbationRecipe {
    std::map<std::string, std::string> renames;
    std::map<std::string, NoiseSpec> noise_specs;
    std::map<std::string, ScaleChange> scale_changes;
    std::vector<MergeSpec> merges;
    std::map<std::string, Binarization> binarizations;
    std::optional<double> shift;  // series: added to every y
    bool hide_metadata = false;   // series: scrub source identity from context
    uint64_t seed = 0;            // default seed when the caller passes none

    void validate(const std::vector<FeatureSchema>& schema) const;
};

// The stock recipes used against the bundled corpora.
PerturbationRecipe default_adult_recipe();
PerturbationRecipe default_series_recipe();

std::string recipe_to_json(const PerturbationRecipe& recipe);
PerturbationRecipe recipe_from_json(const std::string& text);
void save_recipe(const PerturbationRecipe& recipe, const std::string& path);
PerturbationRecipe load_recipe(const std::string& path);
std::string recipe_hash(const PerturbationRecipe& recipe);

// Everything needed to invert numerization: the semantic schema plus the
// normalization statistics of the numeric columns.
struct NumerizeInfo {
    std::vector<FeatureSchema> original_schema;
    FeatureSchema original_target;
    NormParams norm;
};

struct NumerizedDataset {
    TabularDataset data;
    NumerizeInfo info;
};

// Strips all semantics from a dataset: categorical level i of L maps to
// i/(L-1) (single level -> 1.0), numerics are min-max normalized, names
// become "feature 0", "feature 1", ..., units and descriptions are dropped.
// A categorical target becomes class indices with anonymous level names.
NumerizedDataset numerize(const TabularDataset& dataset);

// Same mapping with statistics and level orders taken from a previous fit.
TabularDataset apply_numerize(const TabularDataset& dataset, const NumerizeInfo& info);

// Rewrites the task description as the fixed generic template for the task
// kind; removes the hint and any domain wording. Idempotent.
TaskDescription decontextualize(const TaskDescription& task);

const std::string& generic_classification_task();
const std::string& generic_regression_task();

// Inverse of numerize: decodes categorical codes back to level strings and
// denormalizes numerics (whole-number features are rounded back to integers).
TabularDataset verbalize(const TabularDataset& dataset, const NumerizeInfo& info);

// "Name=value[ unit]" rendering used in prompts for verbalized data.
std::string render_cell(const FeatureSchema& schema, const FeatureValue& value);
std::string render_number(double v, bool integral);

// Adds the context prose and feature explanations to the task text and
// attaches the hinting prompt with [keywords] filled from the domain name.
TaskDescription contextualize(const TaskDescription& task, const ContextBlock& ctx);

std::string hint_for_domain(const std::string& domain_name);

TabularDataset perturb_adult(const TabularDataset& dataset, const PerturbationRecipe& recipe,
                             uint64_t seed);
SeriesDataset perturb_series(const SeriesDataset& series, const PerturbationRecipe& recipe,
                             uint64_t seed);

} // namespace funcmod
