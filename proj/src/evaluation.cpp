#include "funcmod/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "funcmod/csv.hpp"
#include "funcmod/errors.hpp"
#include "funcmod/gp.hpp"
#include "funcmod/prompt.hpp"

namespace funcmod {

using nlohmann::json;

nlohmann::json MetricSet::to_json() const {
    json j;
    if (accuracy) j["accuracy"] = *accuracy;
    if (accuracy_se) j["accuracy_se"] = *accuracy_se;
    if (mse) j["mse"] = *mse;
    if (rmse) j["rmse"] = *rmse;
    j["n_test"] = n_test;
    j["n_extraction_failures"] = n_extraction_failures;
    return j;
}

std::string condition_name(Condition c) {
    switch (c) {
    case Condition::LlmWithoutDomain: return "llm_without_domain";
    case Condition::LlmWithDomain: return "llm_with_domain";
    case Condition::Mlp: return "mlp";
    case Condition::Gp: return "gp";
    }
    return "?";
}

Condition condition_from_string(const std::string& name) {
    if (name == "llm_without_domain") return Condition::LlmWithoutDomain;
    if (name == "llm_with_domain") return Condition::LlmWithDomain;
    if (name == "mlp") return Condition::Mlp;
    if (name.rfind("gp", 0) == 0) return Condition::Gp;
    throw InvalidInput("unknown condition '" + name + "'");
}

nlohmann::json EvalReport::to_json() const {
    json j;
    j["condition"] = condition;
    j["dataset_id"] = dataset_id;
    j["recipe_hash"] = recipe_hash;
    j["metrics"] = metrics.to_json();
    j["config_snapshot"] = config_snapshot;
    j["transcript_path"] = transcript_path;
    if (!captured_rules.empty()) j["captured_rules"] = captured_rules;
    j["test_row_ids"] = test_row_ids;
    return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
    EvalReport r;
    r.condition = j.value("condition", "");
    r.dataset_id = j.value("dataset_id", "");
    r.recipe_hash = j.value("recipe_hash", "");
    if (j.contains("metrics")) {
        const auto& m = j["metrics"];
        if (m.contains("accuracy")) r.metrics.accuracy = m["accuracy"].get<double>();
        if (m.contains("accuracy_se")) r.metrics.accuracy_se = m["accuracy_se"].get<double>();
        if (m.contains("mse")) r.metrics.mse = m["mse"].get<double>();
        if (m.contains("rmse")) r.metrics.rmse = m["rmse"].get<double>();
        r.metrics.n_test = m.value("n_test", size_t{0});
        r.metrics.n_extraction_failures = m.value("n_extraction_failures", size_t{0});
    }
    if (j.contains("config_snapshot")) r.config_snapshot = j["config_snapshot"];
    r.transcript_path = j.value("transcript_path", "");
    r.captured_rules = j.value("captured_rules", "");
    if (j.contains("test_row_ids")) r.test_row_ids = j["test_row_ids"].get<std::vector<size_t>>();
    return r;
}

MetricSet accuracy(const std::vector<Prediction>& predictions,
                   const std::vector<std::string>& truth) {
    if (predictions.size() != truth.size())
        throw InvalidInput("prediction/test length mismatch");
    MetricSet m;
    m.n_test = truth.size();
    size_t correct = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
        if (!predictions[i].ok) {
            ++m.n_extraction_failures;
            continue; // counts as incorrect
        }
        if (predictions[i].label == truth[i]) ++correct;
    }
    double p = truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size());
    m.accuracy = p;
    m.accuracy_se = truth.empty() ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(truth.size()));
    return m;
}

MetricSet regression_metrics(const std::vector<Prediction>& predictions,
                             const std::vector<double>& truth) {
    if (predictions.size() != truth.size())
        throw InvalidInput("prediction/test length mismatch");
    MetricSet m;
    m.n_test = truth.size();
    double sum = 0.0;
    for (size_t i = 0; i < truth.size(); ++i) {
        if (!predictions[i].ok) {
            ++m.n_extraction_failures;
            continue;
        }
        double d = predictions[i].value - truth[i];
        sum += d * d;
    }
    size_t n_ok = truth.size() - m.n_extraction_failures;
    m.mse = n_ok ? sum / static_cast<double>(n_ok) : 0.0;
    m.rmse = std::sqrt(*m.mse);
    return m;
}

RunInputs make_run_inputs(const TabularDataset& dataset, size_t train_n, uint64_t seed,
                          const std::string& dataset_id, const std::string& recipe_hash) {
    RunInputs inputs;
    inputs.dataset_id = dataset_id;
    inputs.recipe_hash = recipe_hash;
    inputs.ctx = dataset.context;

    auto [train_ids, test_ids] = split_indices(dataset, train_n, seed);
    inputs.test_row_ids = test_ids;
    inputs.train.schema = inputs.test.schema = dataset.schema;
    inputs.train.target_schema = inputs.test.target_schema = dataset.target_schema;
    inputs.train.context = inputs.test.context = dataset.context;
    for (size_t i : train_ids) inputs.train.rows.push_back(dataset.rows[i]);
    for (size_t i : test_ids) inputs.test.rows.push_back(dataset.rows[i]);
    return inputs;
}

namespace {

std::vector<std::vector<double>> to_matrix(const TabularDataset& numerized) {
    std::vector<std::vector<double>> X;
    X.reserve(numerized.rows.size());
    for (const auto& row : numerized.rows) {
        std::vector<double> x;
        x.reserve(row.features.size());
        for (const auto& v : row.features) x.push_back(as_number(v));
        X.push_back(std::move(x));
    }
    return X;
}

std::vector<double> to_targets(const TabularDataset& numerized) {
    std::vector<double> y;
    y.reserve(numerized.rows.size());
    for (const auto& row : numerized.rows) {
        if (numerized.task_kind() == TaskKind::Classification)
            y.push_back(parse_double(as_text(row.target)));
        else
            y.push_back(as_number(row.target));
    }
    return y;
}

std::vector<std::string> truth_labels(const TabularDataset& dataset) {
    std::vector<std::string> out;
    out.reserve(dataset.rows.size());
    for (const auto& row : dataset.rows) out.push_back(as_text(row.target));
    return out;
}

std::vector<double> truth_values(const TabularDataset& dataset) {
    std::vector<double> out;
    out.reserve(dataset.rows.size());
    for (const auto& row : dataset.rows) out.push_back(as_number(row.target));
    return out;
}

EvalReport llm_condition(Condition condition, const RunInputs& inputs,
                         const EvalSettings& settings, const CompleteFn& backend,
                         TranscriptLog* log) {
    TaskKind kind = inputs.train.task_kind();
    EvalMode mode = condition == Condition::LlmWithoutDomain ? EvalMode::LikelihoodOnly
                                                             : EvalMode::PosteriorFull;

    NumerizedDataset numerized = numerize(inputs.train);
    TabularDataset prompt_train;
    TabularDataset prompt_test;
    TaskDescription task;
    task.kind = kind;

    if (mode == EvalMode::LikelihoodOnly) {
        prompt_train = numerized.data;
        prompt_test = apply_numerize(inputs.test, numerized.info);
        task = decontextualize(task);
    } else {
        if (!inputs.ctx || inputs.ctx->domain_name.empty())
            throw InvalidContext("posterior condition needs a context block with a domain name");
        prompt_train = verbalize(numerized.data, numerized.info);
        prompt_train.context = inputs.ctx;
        prompt_test = verbalize(apply_numerize(inputs.test, numerized.info), numerized.info);
        task.text = inputs.ctx->task_prose;
        task = contextualize(task, *inputs.ctx);
        task.kind = kind;
    }

    std::vector<std::string> labels;
    if (kind == TaskKind::Classification) labels = prompt_train.target_schema.levels;

    std::vector<BatchItem> items;
    items.reserve(prompt_test.rows.size());
    for (const auto& row : prompt_test.rows) {
        PromptBundle bundle = build_prompt(mode, prompt_train, task, row);
        BatchItem item;
        item.prompt = bundle.full_text();
        item.kind = kind == TaskKind::Classification ? ExpectKind::ClassLabel : ExpectKind::Real;
        item.labels = labels;
        items.push_back(std::move(item));
    }

    BatchOutcome outcome = batch_predict(items, backend, settings.parallelism, log);

    EvalReport report;
    report.condition = condition_name(condition);
    report.dataset_id = inputs.dataset_id;
    report.recipe_hash = inputs.recipe_hash;
    report.test_row_ids = inputs.test_row_ids;
    if (kind == TaskKind::Classification)
        report.metrics = accuracy(outcome.predictions, truth_labels(prompt_test));
    else
        report.metrics = regression_metrics(outcome.predictions, truth_values(inputs.test));
    if (log) report.transcript_path = log->path();

    if (settings.capture_rules) {
        CapturedRules rules = capture_rules(condition, inputs, settings, backend);
        report.captured_rules = rules.text;
    }
    return report;
}

EvalReport mlp_condition(const RunInputs& inputs, const EvalSettings& settings) {
    if (inputs.train.task_kind() != TaskKind::Classification)
        throw InvalidInput("the MLP condition expects a classification dataset");

    NumerizedDataset numerized = numerize(inputs.train);
    TabularDataset test = apply_numerize(inputs.test, numerized.info);

    MlpConfig config = settings.mlp;
    config.task = MlpTask::BinaryClassification;
    if (config.layer_sizes.empty()) config.layer_sizes = {0, 500, 500, 500, 1};
    config.layer_sizes.front() = inputs.train.n_features();
    config.layer_sizes.back() = 1;

    MlpTrainResult trained = mlp_train(config, to_matrix(numerized.data), to_targets(numerized.data));

    std::vector<Prediction> predictions;
    for (const auto& row : test.rows) {
        std::vector<double> x;
        for (const auto& v : row.features) x.push_back(as_number(v));
        Prediction p;
        p.ok = true;
        p.kind = ExpectKind::ClassLabel;
        p.label = std::to_string(trained.model.predict_class(x));
        predictions.push_back(std::move(p));
    }

    EvalReport report;
    report.condition = condition_name(Condition::Mlp);
    report.dataset_id = inputs.dataset_id;
    report.recipe_hash = inputs.recipe_hash;
    report.test_row_ids = inputs.test_row_ids;
    report.metrics = accuracy(predictions, truth_labels(test));
    return report;
}

} // namespace

EvalReport run_condition(Condition condition, const RunInputs& inputs,
                         const EvalSettings& settings, const CompleteFn& backend,
                         TranscriptLog* log) {
    EvalReport report;
    switch (condition) {
    case Condition::LlmWithoutDomain:
    case Condition::LlmWithDomain:
        report = llm_condition(condition, inputs, settings, backend, log);
        break;
    case Condition::Mlp:
        report = mlp_condition(inputs, settings);
        break;
    case Condition::Gp:
        throw InvalidInput("GP conditions run on series data; use the baseline runner");
    }
    return report;
}

MetricSet feature_selection_eval(const FeatureSubset& subset, const TabularDataset& train,
                                 const TabularDataset& test, const MlpConfig& config) {
    if (subset.names.empty()) throw InvalidInput("empty feature subset");

    std::vector<size_t> keep;
    for (const auto& name : subset.names) {
        auto idx = train.feature_index(name);
        if (!idx) throw InvalidInput("unknown feature '" + name + "'");
        keep.push_back(*idx);
    }

    auto project = [&](const TabularDataset& src) {
        TabularDataset out;
        out.target_schema = src.target_schema;
        for (size_t c : keep) out.schema.push_back(src.schema[c]);
        for (const auto& row : src.rows) {
            Example ex;
            for (size_t c : keep) ex.features.push_back(row.features[c]);
            ex.target = row.target;
            out.rows.push_back(std::move(ex));
        }
        return out;
    };

    TabularDataset train_sub = project(train);
    TabularDataset test_sub = project(test);
    NumerizedDataset numerized = numerize(train_sub);
    TabularDataset test_num = apply_numerize(test_sub, numerized.info);

    MlpConfig cfg = config;
    cfg.task = MlpTask::BinaryClassification;
    if (cfg.layer_sizes.empty()) cfg.layer_sizes = {0, 500, 500, 500, 1};
    cfg.layer_sizes.front() = keep.size();
    cfg.layer_sizes.back() = 1;

    MlpTrainResult trained = mlp_train(cfg, to_matrix(numerized.data), to_targets(numerized.data));

    std::vector<Prediction> predictions;
    for (const auto& row : test_num.rows) {
        std::vector<double> x;
        for (const auto& v : row.features) x.push_back(as_number(v));
        Prediction p;
        p.ok = true;
        p.kind = ExpectKind::ClassLabel;
        p.label = std::to_string(trained.model.predict_class(x));
        predictions.push_back(std::move(p));
    }
    return accuracy(predictions, truth_labels(test_num));
}

FeatureSubset llm_select_features(const TabularDataset& dataset, size_t k, EvalMode mode,
                                  const CompleteFn& backend) {
    if (k > dataset.n_features()) throw InvalidInput("k exceeds the feature count");

    TabularDataset view;
    TaskDescription task;
    task.kind = dataset.task_kind();
    if (mode == EvalMode::LikelihoodOnly) {
        view = numerize(dataset).data;
        task = decontextualize(task);
    } else {
        view = dataset;
        if (dataset.context && !dataset.context->domain_name.empty()) {
            task.text = dataset.context->task_prose;
            task = contextualize(task, *dataset.context);
        } else {
            task.text = "Below you are asked to judge which features matter for the target.";
            task.mode_tag = EvalMode::PosteriorFull;
        }
    }

    std::string prompt = build_selection_prompt(view, k, task);
    LlmResponse response = backend(prompt);

    // take the list after the last ANSWER: anchor
    std::string text = response.raw_text;
    size_t anchor = text.rfind("ANSWER:");
    if (anchor == std::string::npos) throw SelectionFailure("no ANSWER line in selection response");
    std::string list = text.substr(anchor + 7);
    if (size_t nl = list.find('\n'); nl != std::string::npos) list = list.substr(0, nl);

    FeatureSubset subset;
    std::set<std::string> seen;
    size_t pos = 0;
    while (pos <= list.size()) {
        size_t comma = list.find(',', pos);
        std::string token = list.substr(pos, comma == std::string::npos ? std::string::npos
                                                                        : comma - pos);
        size_t a = token.find_first_not_of(" \t\r\n");
        if (a != std::string::npos) {
            size_t b = token.find_last_not_of(" \t\r\n.");
            token = token.substr(a, b - a + 1);
            if (!view.feature_index(token))
                throw SelectionFailure("selection named unknown feature '" + token + "'");
            if (seen.insert(token).second) subset.names.push_back(token);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (subset.names.size() != k)
        throw SelectionFailure("expected " + std::to_string(k) + " features, got " +
                               std::to_string(subset.names.size()));
    return subset;
}

CapturedRules capture_rules(Condition condition, const RunInputs& inputs,
                            const EvalSettings& settings, const CompleteFn& backend) {
    if (condition != Condition::LlmWithoutDomain && condition != Condition::LlmWithDomain)
        throw InvalidInput("rules capture applies to LLM conditions");
    (void)settings;

    TaskKind kind = inputs.train.task_kind();
    EvalMode mode = condition == Condition::LlmWithoutDomain ? EvalMode::LikelihoodOnly
                                                             : EvalMode::PosteriorFull;
    NumerizedDataset numerized = numerize(inputs.train);
    TabularDataset view;
    TaskDescription task;
    task.kind = kind;
    if (mode == EvalMode::LikelihoodOnly) {
        view = numerized.data;
        task = decontextualize(task);
    } else {
        if (!inputs.ctx) throw InvalidContext("posterior rules capture needs context");
        view = verbalize(numerized.data, numerized.info);
        task.text = inputs.ctx->task_prose;
        task = contextualize(task, *inputs.ctx);
        task.kind = kind;
    }
    if (view.rows.empty()) throw InvalidInput("rules capture needs in-context data");

    PromptBundle reference = build_prompt(mode, view, task, view.rows.front());
    std::string prompt = build_rules_prompt(reference);
    LlmResponse response = backend(prompt);

    CapturedRules rules;
    rules.text = response.raw_text;
    rules.prompt_hash = prompt_hash(prompt);
    rules.empty_response = response.raw_text.empty();
    return rules;
}

// ---------------------------------------------------------------------------
// Series evaluation

SeriesSplit split_series_by_time(const SeriesDataset& series, double train_max_x, double test_lo,
                                 double test_hi) {
    series.validate();
    SeriesSplit out;
    out.train.x_unit = out.test.x_unit = series.x_unit;
    out.train.y_unit = out.test.y_unit = series.y_unit;
    out.train.context = out.test.context = series.context;
    for (const auto& p : series.points) {
        if (p.x <= train_max_x) out.train.points.push_back(p);
        if (p.x >= test_lo && p.x <= test_hi) out.test.points.push_back(p);
    }
    if (out.train.points.empty() || out.test.points.empty())
        throw InvalidSplit("series split leaves an empty train or test window");
    return out;
}

namespace {

KernelExpr kernel_by_id(const std::string& kernel_id) {
    if (kernel_id == "llm") return make_llm_kernel();
    if (kernel_id == "expert") return make_expert_kernel();
    // single RBF kernel; the white term is the usual observation-noise
    // variance, without which the smooth gram matrix is numerically singular
    if (kernel_id == "rbf") return k_sum(k_rbf(25.0, 8.0), k_white(0.1));
    return parse_kernel(kernel_id);
}

// centered time axis conditions the gram matrix
struct CenteredSeries {
    std::vector<double> x, y;
    double x_mean = 0;
};

CenteredSeries center(const SeriesDataset& s) {
    CenteredSeries out;
    for (const auto& p : s.points) out.x_mean += p.x;
    out.x_mean /= static_cast<double>(s.points.size());
    for (const auto& p : s.points) {
        out.x.push_back(p.x - out.x_mean);
        out.y.push_back(p.y);
    }
    return out;
}

} // namespace

EvalReport run_series_gp(const std::string& kernel_id, const SeriesSplit& split,
                         const GpRunConfig& config) {
    CenteredSeries train = center(split.train);
    KernelExpr kernel = kernel_by_id(kernel_id);
    KernelExpr tuned = gp_optimize(kernel, train.x, train.y, config.restarts, config.steps,
                                   config.seed, config.jitter);
    GpModel model = gp_fit(tuned, train.x, train.y, config.jitter);

    std::vector<double> qx;
    for (const auto& p : split.test.points) qx.push_back(p.x - train.x_mean);
    GpPredictions preds = gp_predict(model, qx);

    std::vector<Prediction> predictions;
    std::vector<double> truth;
    for (size_t i = 0; i < split.test.points.size(); ++i) {
        Prediction p;
        p.ok = true;
        p.kind = ExpectKind::Real;
        p.value = preds.points[i].mean;
        predictions.push_back(p);
        truth.push_back(split.test.points[i].y);
    }

    EvalReport report;
    report.condition = "gp:" + kernel_id;
    report.metrics = regression_metrics(predictions, truth);
    report.config_snapshot = {{"kernel", kernel_to_string(tuned)},
                              {"restarts", config.restarts},
                              {"steps", config.steps},
                              {"seed", config.seed},
                              {"jitter_used", model.jitter},
                              {"lml", gp_log_marginal_likelihood(model)}};
    return report;
}

std::vector<SeriesPoint> gp_series_prediction(const std::string& kernel_text,
                                              const SeriesSplit& split,
                                              const std::vector<double>& query_x) {
    CenteredSeries train = center(split.train);
    GpModel model = gp_fit(parse_kernel(kernel_text), train.x, train.y);
    std::vector<double> qx;
    for (double x : query_x) qx.push_back(x - train.x_mean);
    GpPredictions preds = gp_predict(model, qx);
    std::vector<SeriesPoint> out;
    for (size_t i = 0; i < query_x.size(); ++i)
        out.push_back({query_x[i], preds.points[i].mean});
    return out;
}

RunInputs make_series_run_inputs(const SeriesSplit& split, size_t incontext_n,
                                 const std::string& dataset_id, const std::string& recipe_hash) {
    SeriesDataset train = split.train;
    if (incontext_n > 0 && train.points.size() > incontext_n) {
        // even thinning keeps the full time span
        SeriesDataset thinned = train;
        thinned.points.clear();
        size_t n = train.points.size();
        for (size_t i = 0; i < incontext_n; ++i) {
            size_t idx = i * (n - 1) / (incontext_n - 1);
            thinned.points.push_back(train.points[idx]);
        }
        train = std::move(thinned);
    }

    RunInputs inputs;
    inputs.dataset_id = dataset_id;
    inputs.recipe_hash = recipe_hash;
    inputs.train = series_to_tabular(train);
    inputs.test = series_to_tabular(split.test);
    inputs.ctx = split.train.context;
    for (size_t i = 0; i < split.test.points.size(); ++i) inputs.test_row_ids.push_back(i);
    return inputs;
}

double dominant_period(const std::vector<SeriesPoint>& points, double min_period,
                       double max_period) {
    if (points.size() < 8) throw InvalidInput("too few points for a period estimate");

    // quadratic least-squares detrend via normal equations
    size_t n = points.size();
    double S[5] = {0, 0, 0, 0, 0};
    double T[3] = {0, 0, 0};
    double x0 = points.front().x;
    for (const auto& p : points) {
        double x = p.x - x0;
        double xp = 1.0;
        for (int k = 0; k <= 4; ++k) {
            S[k] += xp;
            if (k <= 2) T[k] += xp * p.y;
            xp *= x;
        }
    }
    // solve the 3x3 system [S0 S1 S2; S1 S2 S3; S2 S3 S4] c = T
    double A[3][3] = {{S[0], S[1], S[2]}, {S[1], S[2], S[3]}, {S[2], S[3], S[4]}};
    double b[3] = {T[0], T[1], T[2]};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == col || A[col][col] == 0) continue;
            double f = A[r][col] / A[col][col];
            for (int c = 0; c < 3; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    double coef[3];
    for (int k = 0; k < 3; ++k) coef[k] = A[k][k] != 0 ? b[k] / A[k][k] : 0.0;

    std::vector<double> resid(n);
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double x = points[i].x - x0;
        resid[i] = points[i].y - (coef[0] + coef[1] * x + coef[2] * x * x);
        mean += resid[i];
    }
    mean /= static_cast<double>(n);
    for (double& r : resid) r -= mean;

    // dense periodogram scan
    double best_period = min_period, best_power = -1.0;
    for (double period = min_period; period <= max_period; period += min_period / 200.0) {
        double c = 0.0, s = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double phase = 2.0 * M_PI * (points[i].x - x0) / period;
            c += resid[i] * std::cos(phase);
            s += resid[i] * std::sin(phase);
        }
        double power = c * c + s * s;
        if (power > best_power) {
            best_power = power;
            best_period = period;
        }
    }
    return best_period;
}

} // namespace funcmod
