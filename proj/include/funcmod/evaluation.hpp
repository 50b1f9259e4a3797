#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "funcmod/client.hpp"
#include "funcmod/dataset.hpp"
#include "funcmod/mi.hpp"
#include "funcmod/mlp.hpp"
#include "funcmod/transforms.hpp"

namespace funcmod {

struct MetricSet {
    std::optional<double> accuracy;
    std::optional<double> accuracy_se; // binomial standard error
    std::optional<double> mse;
    std::optional<double> rmse;
    size_t n_test = 0;
    size_t n_extraction_failures = 0;

    nlohmann::json to_json() const;
};

enum class Condition { LlmWithoutDomain, LlmWithDomain, Mlp, Gp };

std::string condition_name(Condition c);
Condition condition_from_string(const std::string& name);

struct EvalReport {
    std::string condition;
    std::string dataset_id;
    std::string recipe_hash;
    MetricSet metrics;
    nlohmann::json config_snapshot;
    std::string transcript_path;
    std::string captured_rules;
    std::vector<size_t> test_row_ids;

    nlohmann::json to_json() const;
    static EvalReport from_json(const nlohmann::json& j);
};

// Mean 0/1 agreement between predicted and true labels; extraction failures
// score zero. Standard error is sqrt(p(1-p)/n).
MetricSet accuracy(const std::vector<Prediction>& predictions,
                   const std::vector<std::string>& truth);

MetricSet regression_metrics(const std::vector<Prediction>& predictions,
                             const std::vector<double>& truth);

struct EvalSettings {
    MlpConfig mlp;                 // template; input width is set per run
    size_t parallelism = 1;
    size_t repeats_per_query = 1;  // live runs may ask repeatedly; mock needs one
    bool capture_rules = false;
    uint64_t seed = 0;
};

// A resolved experiment: the shared split, the context for posterior runs,
// and the row identities used to prove all conditions saw the same test set.
struct RunInputs {
    TabularDataset train;
    TabularDataset test;
    std::optional<ContextBlock> ctx;
    std::string dataset_id;
    std::string recipe_hash;
    std::vector<size_t> test_row_ids;
};

RunInputs make_run_inputs(const TabularDataset& dataset, size_t train_n, uint64_t seed,
                          const std::string& dataset_id, const std::string& recipe_hash);

// Executes one comparison condition on the shared split:
//  - LlmWithoutDomain: numerize + decontextualize, likelihood-only prompts
//  - LlmWithDomain:    verbalize + contextualize + hint, posterior prompts
//  - Mlp:              trains on the numerized split
// The backend is only consulted for the LLM conditions.
EvalReport run_condition(Condition condition, const RunInputs& inputs,
                         const EvalSettings& settings, const CompleteFn& backend,
                         TranscriptLog* log = nullptr);

// Trains the reference MLP on the named feature columns only.
MetricSet feature_selection_eval(const FeatureSubset& subset, const TabularDataset& train,
                                 const TabularDataset& test, const MlpConfig& config);

// Asks the backend for the top-k features; validates membership and size.
FeatureSubset llm_select_features(const TabularDataset& dataset, size_t k, EvalMode mode,
                                  const CompleteFn& backend);

// Follow-up prompt asking for the prediction rules; the raw text is stored
// verbatim (no scoring).
struct CapturedRules {
    std::string text;
    std::string prompt_hash;
    bool empty_response = false;
};
CapturedRules capture_rules(Condition condition, const RunInputs& inputs,
                            const EvalSettings& settings, const CompleteFn& backend);

// ---------------------------------------------------------------------------
// Series (time-indexed regression) evaluation

struct SeriesSplit {
    SeriesDataset train;
    SeriesDataset test;
};

// Time-based split: train keeps x <= train_max_x, test keeps [test_lo, test_hi].
SeriesSplit split_series_by_time(const SeriesDataset& series, double train_max_x, double test_lo,
                                 double test_hi);

struct GpRunConfig {
    int restarts = 3;
    int steps = 80;
    uint64_t seed = 0;
    double jitter = 1e-8;
};

// Fits and evaluates a GP baseline on the split. kernel_id is "llm", "expert",
// "rbf", or a kernel expression in text form; the optimized kernel and
// extrapolation RMSE land in the report.
EvalReport run_series_gp(const std::string& kernel_id, const SeriesSplit& split,
                         const GpRunConfig& config);

// Mean posterior prediction of the fitted kernel over query points.
std::vector<SeriesPoint> gp_series_prediction(const std::string& kernel_text,
                                              const SeriesSplit& split,
                                              const std::vector<double>& query_x);

// LLM conditions on a series: the train window becomes the in-context set
// (evenly thinned to incontext_n when longer) and the test points the queries.
RunInputs make_series_run_inputs(const SeriesSplit& split, size_t incontext_n,
                                 const std::string& dataset_id, const std::string& recipe_hash);

// Dominant oscillation period of a signal after removing a least-squares
// quadratic trend, located by a dense periodogram scan; same units as x.
double dominant_period(const std::vector<SeriesPoint>& points, double min_period,
                       double max_period);

} // namespace funcmod
