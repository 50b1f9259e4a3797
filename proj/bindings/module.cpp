#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "funcmod/cli.hpp"
#include "funcmod/corpus.hpp"
#include "funcmod/csv.hpp"
#include "funcmod/dataset.hpp"
#include "funcmod/errors.hpp"
#include "funcmod/evaluation.hpp"
#include "funcmod/extract.hpp"
#include "funcmod/gp.hpp"
#include "funcmod/kernel.hpp"
#include "funcmod/mi.hpp"
#include "funcmod/mlp.hpp"
#include "funcmod/mock.hpp"
#include "funcmod/prompt.hpp"
#include "funcmod/synthetic.hpp"
#include "funcmod/transforms.hpp"

namespace py = pybind11;
using namespace funcmod;

namespace {

std::vector<std::string> feature_names(const TabularDataset& ds) {
    std::vector<std::string> names;
    for (const auto& fs : ds.schema) names.push_back(fs.name);
    return names;
}

std::pair<std::vector<double>, std::vector<double>> series_columns(const SeriesDataset& s) {
    std::vector<double> x, y;
    for (const auto& p : s.points) {
        x.push_back(p.x);
        y.push_back(p.y);
    }
    return {x, y};
}

SeriesDataset series_from_columns(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidInput("x and y must have the same length");
    SeriesDataset s;
    for (size_t i = 0; i < x.size(); ++i) s.points.push_back({x[i], y[i]});
    s.validate();
    return s;
}

} // namespace

PYBIND11_MODULE(_funcmod, m) {
    m.doc() = "function-modeling evaluation harness (C++ core)";

    py::register_exception<Error>(m, "FuncmodError");

    py::enum_<EvalMode>(m, "EvalMode")
        .value("LIKELIHOOD_ONLY", EvalMode::LikelihoodOnly)
        .value("POSTERIOR_FULL", EvalMode::PosteriorFull);
    py::enum_<TaskKind>(m, "TaskKind")
        .value("CLASSIFICATION", TaskKind::Classification)
        .value("REGRESSION", TaskKind::Regression);

    py::class_<TabularDataset>(m, "TabularDataset")
        .def_property_readonly("n_rows", &TabularDataset::n_rows)
        .def_property_readonly("n_features", &TabularDataset::n_features)
        .def_property_readonly("feature_names", &feature_names)
        .def_property_readonly("target_name",
                               [](const TabularDataset& ds) { return ds.target_schema.name; })
        .def_property_readonly("target_levels",
                               [](const TabularDataset& ds) { return ds.target_schema.levels; })
        .def("to_csv", &tabular_to_csv)
        .def("schema_json", &schema_to_json)
        .def("validate", &TabularDataset::validate)
        .def("split", [](const TabularDataset& ds, size_t train_n, uint64_t seed) {
            return split(ds, train_n, seed);
        });

    py::class_<SeriesDataset>(m, "SeriesDataset")
        .def_property_readonly("columns", &series_columns)
        .def_property_readonly("n_points",
                               [](const SeriesDataset& s) { return s.points.size(); })
        .def("to_csv", &series_to_csv)
        .def("to_tabular", &series_to_tabular);

    py::class_<NumerizedDataset>(m, "NumerizedDataset")
        .def_property_readonly("data", [](const NumerizedDataset& nd) { return nd.data; })
        .def("verbalize", [](const NumerizedDataset& nd) { return verbalize(nd.data, nd.info); });

    m.def("load_tabular", &load_tabular, py::arg("csv_path"), py::arg("schema_path"));
    m.def("save_tabular", &save_tabular, py::arg("dataset"), py::arg("csv_path"),
          py::arg("schema_path"));
    m.def("load_series", &load_series, py::arg("csv_path"), py::arg("meta_path") = "");
    m.def("save_series", &save_series, py::arg("series"), py::arg("csv_path"),
          py::arg("meta_path") = "");
    m.def("series_from_columns", &series_from_columns, py::arg("x"), py::arg("y"));

    // corpora
    m.def("make_adultlike", &make_adultlike, py::arg("n"), py::arg("seed") = 0);
    m.def("make_co2like", &make_co2like, py::arg("start_year") = 1958.25,
          py::arg("end_year") = 2001.0, py::arg("seed") = 0);

    // transforms
    m.def("numerize", &numerize, py::arg("dataset"));
    m.def("default_adult_recipe_json",
          []() { return recipe_to_json(default_adult_recipe()); });
    m.def("default_series_recipe_json",
          []() { return recipe_to_json(default_series_recipe()); });
    m.def(
        "perturb_adult",
        [](const TabularDataset& ds, const std::string& recipe_json, uint64_t seed) {
            PerturbationRecipe recipe =
                recipe_json.empty() ? default_adult_recipe() : recipe_from_json(recipe_json);
            return perturb_adult(ds, recipe, seed);
        },
        py::arg("dataset"), py::arg("recipe_json") = "", py::arg("seed") = 0);
    m.def(
        "perturb_series",
        [](const SeriesDataset& s, const std::string& recipe_json, uint64_t seed) {
            PerturbationRecipe recipe =
                recipe_json.empty() ? default_series_recipe() : recipe_from_json(recipe_json);
            return perturb_series(s, recipe, seed);
        },
        py::arg("series"), py::arg("recipe_json") = "", py::arg("seed") = 0);
    m.def("generic_classification_task", &generic_classification_task);
    m.def("generic_regression_task", &generic_regression_task);
    m.def("hint_for_domain", &hint_for_domain, py::arg("domain_name"));
    m.def(
        "blocklist_hits",
        [](const TabularDataset& ds, const std::string& text) {
            return Blocklist::for_dataset(ds).hits(text);
        },
        py::arg("dataset"), py::arg("text"));

    // synthetic functions
    m.def(
        "eval_function",
        [](const std::string& family, const std::vector<double>& params, double x) {
            FunctionSpec spec = default_spec(family_from_string(family));
            if (!params.empty()) spec.params = params;
            spec.validate();
            return eval_function(spec, x);
        },
        py::arg("family"), py::arg("params"), py::arg("x"));
    m.def(
        "gen_sampleset",
        [](const std::string& family, const std::vector<double>& params, double x_lo, double x_hi,
           double noise_sd, uint64_t seed, size_t n) {
            FunctionSpec spec = default_spec(family_from_string(family));
            if (!params.empty()) spec.params = params;
            spec.x_lo = x_lo;
            spec.x_hi = x_hi;
            spec.noise_sd = noise_sd;
            spec.seed = seed;
            SampleSet s = gen_sampleset(spec, n);
            std::vector<std::pair<double, double>> pts;
            for (const auto& p : s.points) pts.push_back({p.x, p.y});
            return pts;
        },
        py::arg("family"), py::arg("params") = std::vector<double>{}, py::arg("x_lo") = 0.0,
        py::arg("x_hi") = 10.0, py::arg("noise_sd") = 0.0, py::arg("seed") = 0, py::arg("n") = 25);
    m.def("function_families", []() {
        std::vector<std::string> names;
        for (auto f : {FunctionFamily::Linear, FunctionFamily::Quadratic,
                       FunctionFamily::Logarithmic, FunctionFamily::Sine, FunctionFamily::PowerLaw,
                       FunctionFamily::Gaussian, FunctionFamily::Piecewise, FunctionFamily::Step,
                       FunctionFamily::Exponential, FunctionFamily::PeriodicLinear})
            names.push_back(to_string(f));
        return names;
    });

    // kernels and GP regression
    py::class_<KernelExpr>(m, "KernelExpr")
        .def("__str__", &kernel_to_string)
        .def_property_readonly("n_leaves", &KernelExpr::n_leaves)
        .def_property_readonly("n_params", &KernelExpr::n_params)
        .def("eval", [](const KernelExpr& k, double x, double xp) { return kernel_eval(k, x, xp); });
    m.def("parse_kernel", [](const std::string& text) { return parse_kernel(text); },
          py::arg("text"));
    m.def("make_llm_kernel", &make_llm_kernel);
    m.def("make_expert_kernel", &make_expert_kernel);

    py::class_<GpModel>(m, "GpModel")
        .def_property_readonly("kernel", [](const GpModel& g) { return g.kernel; })
        .def_property_readonly("jitter", [](const GpModel& g) { return g.jitter; })
        .def("log_marginal_likelihood",
             [](const GpModel& g) { return gp_log_marginal_likelihood(g); })
        .def("predict", [](const GpModel& g, const std::vector<double>& x) {
            GpPredictions p = gp_predict(g, x);
            std::vector<double> mean, var;
            for (const auto& q : p.points) {
                mean.push_back(q.mean);
                var.push_back(q.variance);
            }
            return std::make_pair(mean, var);
        });
    m.def(
        "gp_fit",
        [](const KernelExpr& k, const std::vector<double>& x, const std::vector<double>& y,
           double jitter) { return gp_fit(k, x, y, jitter); },
        py::arg("kernel"), py::arg("x"), py::arg("y"), py::arg("jitter") = 1e-8);
    m.def(
        "gp_optimize",
        [](const KernelExpr& k, const std::vector<double>& x, const std::vector<double>& y,
           int restarts, int steps, uint64_t seed) {
            return gp_optimize(k, x, y, restarts, steps, seed);
        },
        py::arg("kernel"), py::arg("x"), py::arg("y"), py::arg("restarts") = 3,
        py::arg("steps") = 60, py::arg("seed") = 0);

    // MLP baseline
    py::class_<MlpConfig>(m, "MlpConfig")
        .def(py::init<>())
        .def_readwrite("layer_sizes", &MlpConfig::layer_sizes)
        .def_readwrite("learning_rate", &MlpConfig::learning_rate)
        .def_readwrite("epochs", &MlpConfig::epochs)
        .def_readwrite("batch_size", &MlpConfig::batch_size)
        .def_readwrite("seed", &MlpConfig::seed)
        .def_property(
            "activation",
            [](const MlpConfig& c) { return c.activation == Activation::Relu ? "relu" : "tanh"; },
            [](MlpConfig& c, const std::string& a) {
                c.activation = a == "tanh" ? Activation::Tanh : Activation::Relu;
            })
        .def_property(
            "task",
            [](const MlpConfig& c) {
                return c.task == MlpTask::Regression ? "regression" : "binary_classification";
            },
            [](MlpConfig& c, const std::string& t) {
                c.task = t == "regression" ? MlpTask::Regression : MlpTask::BinaryClassification;
            });
    py::class_<MlpModel>(m, "MlpModel")
        .def("predict_real",
             [](const MlpModel& mdl, const std::vector<double>& x) { return mdl.predict_real(x); })
        .def("predict_proba",
             [](const MlpModel& mdl, const std::vector<double>& x) { return mdl.predict_proba(x); })
        .def("predict_class",
             [](const MlpModel& mdl, const std::vector<double>& x) { return mdl.predict_class(x); })
        .def("save", &MlpModel::save)
        .def_static("load", &MlpModel::load);
    m.def(
        "mlp_train",
        [](const MlpConfig& cfg, const std::vector<std::vector<double>>& X,
           const std::vector<double>& y) {
            MlpTrainResult r = mlp_train(cfg, X, y);
            return std::make_pair(r.model, r.loss_trace);
        },
        py::arg("config"), py::arg("X"), py::arg("y"));
    m.def("mlp_grad_check", &mlp_grad_check, py::arg("config"), py::arg("X"), py::arg("y"),
          py::arg("step") = 1e-5);

    // mutual information selection
    m.def(
        "mi_greedy",
        [](const TabularDataset& ds, size_t k, int bins) { return mi_greedy(ds, k, bins).names; },
        py::arg("dataset"), py::arg("k"), py::arg("bins") = 4);
    m.def(
        "mi_exhaustive",
        [](const TabularDataset& ds, size_t k, int bins) {
            return mi_exhaustive(ds, k, bins).names;
        },
        py::arg("dataset"), py::arg("k"), py::arg("bins") = 4);
    m.def(
        "subset_mi",
        [](const TabularDataset& ds, const std::vector<std::string>& names, int bins) {
            return subset_mi(ds, FeatureSubset{names}, bins);
        },
        py::arg("dataset"), py::arg("names"), py::arg("bins") = 4);

    // prompting, extraction and the offline mock
    m.def(
        "build_likelihood_prompt",
        [](const TabularDataset& numerized, const std::vector<double>& query) {
            TaskDescription task;
            task.kind = numerized.task_kind();
            task = decontextualize(task);
            Example q;
            for (double v : query) q.features.push_back(v);
            q.target = numerized.task_kind() == TaskKind::Classification
                           ? FeatureValue(std::string("0"))
                           : FeatureValue(0.0);
            return build_prompt(EvalMode::LikelihoodOnly, numerized, task, q).full_text();
        },
        py::arg("numerized_dataset"), py::arg("query"));
    m.def("mock_complete",
          [](const std::string& prompt) { return mock_complete(prompt).raw_text; });
    m.def(
        "extract",
        [](const std::string& text, const std::string& kind,
           const std::vector<std::string>& labels) {
            Prediction p = extract(
                text, kind == "class" ? ExpectKind::ClassLabel : ExpectKind::Real, labels);
            py::dict out;
            out["ok"] = p.ok;
            if (p.ok) {
                if (p.kind == ExpectKind::ClassLabel) out["label"] = p.label;
                else out["value"] = p.value;
            } else {
                out["failure"] = p.failure;
            }
            return out;
        },
        py::arg("text"), py::arg("kind") = "real",
        py::arg("labels") = std::vector<std::string>{});

    // metrics
    m.def(
        "accuracy",
        [](const std::vector<std::string>& predicted, const std::vector<std::string>& truth) {
            std::vector<Prediction> preds;
            for (const auto& label : predicted) {
                Prediction p;
                p.ok = !label.empty();
                p.kind = ExpectKind::ClassLabel;
                p.label = label;
                if (!p.ok) p.failure = "empty prediction";
                preds.push_back(p);
            }
            MetricSet mset = accuracy(preds, truth);
            py::dict out;
            out["accuracy"] = *mset.accuracy;
            out["accuracy_se"] = *mset.accuracy_se;
            out["n_test"] = mset.n_test;
            out["n_extraction_failures"] = mset.n_extraction_failures;
            return out;
        },
        py::arg("predicted"), py::arg("truth"));

    // the whole CLI, callable in-process
    m.def("run_cli",
          [](const std::vector<std::string>& args) { return run_cli(args); });

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
