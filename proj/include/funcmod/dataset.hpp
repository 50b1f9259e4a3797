#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace funcmod {

enum class EvalMode { LikelihoodOnly, PosteriorFull };
enum class TaskKind { Classification, Regression };

std::string to_string(EvalMode mode);

// A feature is either numeric or categorical with an ordered level list.
// The level order is the encoding order, so categorical -> scalar mapping
// is deterministic.
struct FeatureSchema {
    std::string name;
    bool categorical = false;
    std::vector<std::string> levels; // ordered; only for categorical
    std::string unit;                // empty = none
    std::string description;        // empty = none

    std::optional<size_t> level_index(const std::string& level) const;
    void validate() const;
};

using FeatureValue = std::variant<double, std::string>;

bool is_numeric(const FeatureValue& v);
double as_number(const FeatureValue& v);
const std::string& as_text(const FeatureValue& v);

struct Example {
    std::vector<FeatureValue> features;
    FeatureValue target;
};

// Free-text task context: the domain name slots into the hinting prompt,
// the prose and per-feature explanations go into the task description.
struct ContextBlock {
    std::string domain_name;
    std::string task_prose;
    std::map<std::string, std::string> feature_explanations;
    std::string source_prose;
};

struct TabularDataset {
    std::vector<FeatureSchema> schema;
    FeatureSchema target_schema;
    std::vector<Example> rows;
    std::optional<ContextBlock> context;

    size_t n_features() const { return schema.size(); }
    size_t n_rows() const { return rows.size(); }
    TaskKind task_kind() const {
        return target_schema.categorical ? TaskKind::Classification : TaskKind::Regression;
    }
    std::optional<size_t> feature_index(const std::string& name) const;
    void validate() const; // throws InvalidData on schema violations
};

struct SeriesPoint {
    double x = 0;
    double y = 0;
};

struct SeriesDataset {
    std::vector<SeriesPoint> points;
    std::string x_unit;
    std::string y_unit;
    std::optional<ContextBlock> context;

    void validate() const; // x strictly increasing, finite values
};

// Per-feature training statistics; entries for categorical features are
// present but unused so indices line up with the schema.
struct FeatureRange {
    double min = 0;
    double max = 0;
    bool used = false;     // numeric feature that was normalized
    bool integral = false; // all training values were whole numbers
};

struct NormParams {
    std::vector<FeatureRange> ranges;
};

// Maps every numeric value to [0,1] by (v-min)/(max-min) using the dataset's
// own statistics; constant features map to 0.5. Categorical columns pass
// through untouched.
std::pair<TabularDataset, NormParams> normalize_minmax(const TabularDataset& dataset);

// Normalizes with previously fitted statistics (test rows keep the training
// min/max, so values outside the training range leave [0,1]).
TabularDataset apply_minmax(const TabularDataset& dataset, const NormParams& params);

double denormalize(double v01, const FeatureRange& range);

// Deterministic split; label-stratified when the target is categorical.
std::pair<TabularDataset, TabularDataset> split(const TabularDataset& dataset,
                                                size_t train_n, uint64_t seed);

// Row indices of the same split, train then test, each in ascending order.
std::pair<std::vector<size_t>, std::vector<size_t>> split_indices(const TabularDataset& dataset,
                                                                  size_t train_n, uint64_t seed);

// CSV + sidecar schema persistence. The writer is canonical: numbers in
// shortest round-trip form, LF newlines, minimal quoting.
void save_tabular(const TabularDataset& dataset, const std::string& csv_path,
                  const std::string& schema_path);
TabularDataset load_tabular(const std::string& csv_path, const std::string& schema_path);
std::string tabular_to_csv(const TabularDataset& dataset);
std::string schema_to_json(const TabularDataset& dataset);

void save_series(const SeriesDataset& series, const std::string& csv_path,
                 const std::string& meta_path = "");
SeriesDataset load_series(const std::string& csv_path, const std::string& meta_path = "");
std::string series_to_csv(const SeriesDataset& series);

// 1-D bridge: series as a tabular regression dataset (feature "x", target "y")
// so the prompt pipeline can consume it.
TabularDataset series_to_tabular(const SeriesDataset& series);

} // namespace funcmod
