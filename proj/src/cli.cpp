#include "funcmod/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "funcmod/corpus.hpp"
#include "funcmod/csv.hpp"
#include "funcmod/errors.hpp"
#include "funcmod/evaluation.hpp"
#include "funcmod/gp.hpp"
#include "funcmod/mi.hpp"
#include "funcmod/mock.hpp"
#include "funcmod/report.hpp"
#include "funcmod/rng.hpp"
#include "funcmod/svg.hpp"
#include "funcmod/synthetic.hpp"
#include "funcmod/transforms.hpp"

namespace funcmod {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= csv.size()) {
        size_t comma = csv.find(',', pos);
        std::string tok =
            csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) out.push_back(parse_double(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

PerturbationRecipe resolve_recipe(const std::string& spec) {
    if (spec == "default-adult") return default_adult_recipe();
    if (spec == "default-series") return default_series_recipe();
    return load_recipe(spec);
}

ClientConfig client_from_json(const json& j) {
    ClientConfig c;
    c.endpoint_url = j.value("endpoint_url", c.endpoint_url);
    c.model_name = j.value("model_name", c.model_name);
    c.temperature = j.value("temperature", c.temperature);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.concurrency_limit = j.value("concurrency_limit", c.concurrency_limit);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    return c;
}

MlpConfig mlp_from_json(const json& j) {
    MlpConfig c;
    size_t hidden = j.value("hidden", size_t{500});
    size_t weight_layers = j.value("layers", size_t{4});
    c.layer_sizes.push_back(0); // input width filled per run
    for (size_t l = 0; l + 1 < weight_layers; ++l) c.layer_sizes.push_back(hidden);
    c.layer_sizes.push_back(1);
    c.activation = j.value("activation", std::string("relu")) == "tanh" ? Activation::Tanh
                                                                        : Activation::Relu;
    c.learning_rate = j.value("learning_rate", 0.05);
    c.epochs = j.value("epochs", size_t{500});
    c.batch_size = j.value("batch_size", size_t{64});
    c.task = MlpTask::BinaryClassification;
    return c;
}

struct LoadedData {
    std::optional<TabularDataset> tabular;
    std::optional<SeriesDataset> series;
    std::string dataset_id;
};

LoadedData load_dataset(const json& dj) {
    LoadedData out;
    std::string kind = dj.value("kind", "tabular");
    if (kind == "tabular") {
        out.tabular = load_tabular(dj.at("csv").get<std::string>(),
                                   dj.at("schema").get<std::string>());
        out.dataset_id = fs::path(dj.at("csv").get<std::string>()).stem().string();
    } else if (kind == "series") {
        out.series = load_series(dj.at("csv").get<std::string>(), dj.value("meta", ""));
        out.dataset_id = fs::path(dj.at("csv").get<std::string>()).stem().string();
    } else if (kind == "adultlike") {
        out.tabular = make_adultlike(dj.value("n", size_t{12000}), dj.value("seed", uint64_t{0}));
        out.dataset_id = "adultlike-n" + std::to_string(dj.value("n", size_t{12000})) + "-s" +
                         std::to_string(dj.value("seed", uint64_t{0}));
    } else if (kind == "co2like") {
        out.series = make_co2like(dj.value("start", 1958.25), dj.value("end", 2001.0),
                                  dj.value("seed", uint64_t{0}));
        out.dataset_id = "co2like-s" + std::to_string(dj.value("seed", uint64_t{0}));
    } else if (kind == "synthetic") {
        FunctionSpec spec;
        spec.family = family_from_string(dj.at("family").get<std::string>());
        spec.params = dj.contains("params") ? dj["params"].get<std::vector<double>>()
                                            : default_spec(spec.family).params;
        if (dj.contains("x_range")) {
            spec.x_lo = dj["x_range"][0].get<double>();
            spec.x_hi = dj["x_range"][1].get<double>();
        } else {
            FunctionSpec d = default_spec(spec.family);
            spec.x_lo = d.x_lo;
            spec.x_hi = d.x_hi;
        }
        spec.noise_sd = dj.value("noise_sd", 0.0);
        spec.seed = dj.value("seed", uint64_t{0});
        size_t n = dj.value("n", size_t{25});
        size_t n_queries = dj.value("n_queries", size_t{10});

        // in-context samples plus interior query points as the test rows
        SyntheticTask base = make_synthetic_task(spec, {}, n);
        TabularDataset all = base.train;
        Rng qrng = Rng(spec.seed).split("queries");
        for (size_t i = 0; i < n_queries; ++i) {
            double q = qrng.uniform(i, spec.x_lo, spec.x_hi);
            Example ex;
            ex.features.push_back(q);
            ex.target = eval_function(spec, q);
            all.rows.push_back(ex);
        }
        ContextBlock ctx;
        ctx.domain_name = "mathematical functions";
        ctx.task_prose = "Below you are asked to predict the value y of an unknown smooth "
                         "function at a query point x, given sampled training data. An intuitive "
                         "guess rather than an accurate estimate is enough.";
        ctx.feature_explanations = {{"x", "the input of the function"}};
        all.context = ctx;
        out.tabular = all;
        out.dataset_id = "synthetic-" + to_string(spec.family) + "-s" + std::to_string(spec.seed);
    } else {
        throw InvalidInput("unknown dataset kind '" + kind + "'");
    }
    return out;
}

json seeds_snapshot(uint64_t seed) {
    // derivation labels used across the run, for reproducibility records
    return json{{"run_seed", seed},
                {"streams",
                 {"split", "perturb/<feature>", "mlp-init", "mlp-shuffle", "gp-optimize",
                  "queries", "corpus/<feature>"}}};
}

int cmd_synth(const std::string& family, const std::string& params, const std::string& x_range,
              double noise_sd, size_t n, uint64_t seed, const std::string& out_dir) {
    FunctionSpec spec = default_spec(family_from_string(family));
    if (!params.empty()) spec.params = parse_double_list(params);
    if (!x_range.empty()) {
        auto r = parse_double_list(x_range);
        if (r.size() != 2) throw InvalidInput("--x-range expects lo,hi");
        spec.x_lo = r[0];
        spec.x_hi = r[1];
    }
    spec.noise_sd = noise_sd;
    spec.seed = seed;
    SampleSet samples = gen_sampleset(spec, n);

    SeriesDataset series;
    series.points = samples.points;
    series.x_unit = "x";
    series.y_unit = "y";
    fs::create_directories(out_dir);
    save_series(series, out_dir + "/sampleset.csv");
    write_file_atomic(out_dir + "/spec.json", spec_to_json(spec));
    std::cout << "wrote " << out_dir << "/sampleset.csv (" << samples.points.size() << " rows)\n";
    return 0;
}

int cmd_gen_adult(size_t n, uint64_t seed, const std::string& out_dir) {
    TabularDataset ds = make_adultlike(n, seed);
    fs::create_directories(out_dir);
    save_tabular(ds, out_dir + "/adult.csv", out_dir + "/adult.schema.json");
    std::cout << "wrote " << out_dir << "/adult.csv (" << ds.n_rows() << " rows)\n";
    return 0;
}

int cmd_gen_co2(double start, double end, uint64_t seed, const std::string& out_dir) {
    SeriesDataset s = make_co2like(start, end, seed);
    fs::create_directories(out_dir);
    save_series(s, out_dir + "/co2.csv", out_dir + "/co2.meta.json");
    std::cout << "wrote " << out_dir << "/co2.csv (" << s.points.size() << " points)\n";
    return 0;
}

int cmd_perturb(const std::string& data, const std::string& schema, const std::string& meta,
                bool is_series, const std::string& recipe_spec, std::optional<uint64_t> seed,
                const std::string& out_dir) {
    PerturbationRecipe recipe = resolve_recipe(recipe_spec);
    uint64_t effective_seed = seed.value_or(recipe.seed);
    fs::create_directories(out_dir);
    if (is_series) {
        SeriesDataset s = load_series(data, meta);
        SeriesDataset p = perturb_series(s, recipe, effective_seed);
        save_series(p, out_dir + "/perturbed.csv", out_dir + "/perturbed.meta.json");
        std::cout << "wrote " << out_dir << "/perturbed.csv\n";
    } else {
        TabularDataset ds = load_tabular(data, schema);
        TabularDataset p = perturb_adult(ds, recipe, effective_seed);
        save_tabular(p, out_dir + "/perturbed.csv", out_dir + "/perturbed.schema.json");
        std::cout << "wrote " << out_dir << "/perturbed.csv (" << p.n_rows() << " rows)\n";
    }
    save_recipe(recipe, out_dir + "/recipe.json");
    return 0;
}

struct EvalArgs {
    std::string config_path;
    std::string out_dir;
    std::string backend = "mock";
    std::string mode = "both";
    std::optional<uint64_t> seed;
};

int cmd_eval(const EvalArgs& args, bool baselines_only) {
    json cfg = json::parse(read_file(args.config_path));
    uint64_t seed = args.seed.value_or(cfg.value("seed", uint64_t{0}));

    LoadedData data = load_dataset(cfg.at("dataset"));
    std::string recipe_hash_str;
    if (cfg.contains("recipe") && !cfg["recipe"].is_null()) {
        PerturbationRecipe recipe = resolve_recipe(cfg["recipe"].get<std::string>());
        recipe_hash_str = recipe_hash(recipe);
        uint64_t pseed = cfg.value("perturb_seed", recipe.seed);
        if (data.tabular) data.tabular = perturb_adult(*data.tabular, recipe, pseed);
        if (data.series) data.series = perturb_series(*data.series, recipe, pseed);
    }

    EvalSettings settings;
    settings.seed = seed;
    settings.parallelism = cfg.value("parallelism", size_t{1});
    settings.repeats_per_query = cfg.value("repeats_per_query", size_t{1});
    settings.capture_rules = cfg.value("capture_rules", false);
    if (cfg.contains("mlp")) settings.mlp = mlp_from_json(cfg["mlp"]);
    else settings.mlp = mlp_from_json(json::object());

    CompleteFn backend;
    if (args.backend == "mock") {
        backend = make_mock_backend();
    } else if (args.backend == "live") {
        backend = make_live_backend(client_from_json(cfg.value("client", json::object())));
    } else {
        throw InvalidInput("--backend must be mock or live");
    }

    std::vector<std::string> conditions;
    if (cfg.contains("conditions")) conditions = cfg["conditions"].get<std::vector<std::string>>();
    else if (data.tabular) conditions = {"llm_without_domain", "llm_with_domain", "mlp"};
    else conditions = {"gp:rbf", "gp:llm", "gp:expert"};

    auto mode_allows = [&](const std::string& c) {
        if (baselines_only) return c == "mlp" || c.rfind("gp:", 0) == 0;
        if (args.mode == "raw") return c != "llm_with_domain";
        if (args.mode == "domain") return c != "llm_without_domain";
        return true;
    };

    fs::create_directories(args.out_dir);
    std::vector<EvalReport> reports;

    if (data.tabular) {
        const json& split_cfg = cfg.value("split", json::object());
        size_t train_n = split_cfg.value("train_n", size_t{100});
        size_t test_n = split_cfg.value("test_n", size_t{500});
        RunInputs inputs =
            make_run_inputs(*data.tabular, train_n, seed, data.dataset_id, recipe_hash_str);
        if (test_n > 0 && inputs.test.rows.size() > test_n) {
            inputs.test.rows.resize(test_n);
            inputs.test_row_ids.resize(test_n);
        }
        for (const auto& cname : conditions) {
            if (!mode_allows(cname)) continue;
            Condition cond = condition_from_string(cname);
            if (cond == Condition::Gp) continue; // GP baselines run on series data
            std::unique_ptr<TranscriptLog> log;
            if (cond == Condition::LlmWithoutDomain || cond == Condition::LlmWithDomain)
                log = std::make_unique<TranscriptLog>(args.out_dir + "/transcripts/" + cname +
                                                      ".jsonl");
            EvalReport report = run_condition(cond, inputs, settings, backend, log.get());
            report.config_snapshot = cfg;
            reports.push_back(std::move(report));
        }
    } else if (data.series) {
        const json& gp_cfg = cfg.value("gp", json::object());
        double train_before = gp_cfg.value("train_max_x", 1980.999);
        double test_lo = gp_cfg.value("test_lo", 1990.0);
        double test_hi = gp_cfg.value("test_hi", 1992.999);
        SeriesSplit split = split_series_by_time(*data.series, train_before, test_lo, test_hi);

        GpRunConfig gp_run;
        gp_run.restarts = gp_cfg.value("restarts", 3);
        gp_run.steps = gp_cfg.value("steps", 80);
        gp_run.seed = seed;

        size_t incontext_n = cfg.value("split", json::object()).value("train_n", size_t{0});
        for (const auto& cname : conditions) {
            if (!mode_allows(cname)) continue;
            if (cname.rfind("gp:", 0) == 0) {
                EvalReport report = run_series_gp(cname.substr(3), split, gp_run);
                report.dataset_id = data.dataset_id;
                report.recipe_hash = recipe_hash_str;
                json snap = report.config_snapshot;
                report.config_snapshot = cfg;
                report.config_snapshot["gp_result"] = snap;
                reports.push_back(std::move(report));
            } else {
                Condition cond = condition_from_string(cname);
                if (cond == Condition::Mlp) continue;
                RunInputs inputs =
                    make_series_run_inputs(split, incontext_n, data.dataset_id, recipe_hash_str);
                std::unique_ptr<TranscriptLog> log = std::make_unique<TranscriptLog>(
                    args.out_dir + "/transcripts/" + cname + ".jsonl");
                EvalReport report = run_condition(cond, inputs, settings, backend, log.get());
                report.config_snapshot = cfg;
                reports.push_back(std::move(report));
            }
        }
    }

    json run_config = cfg;
    run_config["resolved"] = {{"seed", seed},
                              {"backend", args.backend},
                              {"mode", args.mode},
                              {"dataset_id", data.dataset_id},
                              {"recipe_hash", recipe_hash_str}};
    write_run_report(args.out_dir, reports, run_config);
    write_file_atomic(args.out_dir + "/seeds.json", seeds_snapshot(seed).dump(2) + "\n");

    size_t failures = 0;
    for (const auto& r : reports) failures += r.metrics.n_extraction_failures;
    std::cout << "wrote " << reports.size() << " reports to " << args.out_dir << " ("
              << failures << " extraction failures)\n";
    return 0;
}

int cmd_select_features(const std::string& config_path, size_t k, const std::string& backend_name,
                        const std::string& out_dir) {
    json cfg = json::parse(read_file(config_path));
    LoadedData data = load_dataset(cfg.at("dataset"));
    if (!data.tabular) throw InvalidInput("feature selection needs a tabular dataset");
    if (cfg.contains("recipe") && !cfg["recipe"].is_null()) {
        PerturbationRecipe recipe = resolve_recipe(cfg["recipe"].get<std::string>());
        data.tabular = perturb_adult(*data.tabular, recipe, cfg.value("perturb_seed", recipe.seed));
    }
    uint64_t seed = cfg.value("seed", uint64_t{0});

    CompleteFn backend = backend_name == "live"
                             ? make_live_backend(client_from_json(cfg.value("client", json::object())))
                             : make_mock_backend();

    const json& split_cfg = cfg.value("split", json::object());
    size_t train_n = split_cfg.value("train_n", size_t{10000});
    RunInputs inputs = make_run_inputs(*data.tabular, train_n, seed, data.dataset_id, "");

    json result;
    result["k"] = k;

    auto evaluate_subset = [&](const FeatureSubset& subset) {
        MlpConfig mlp = cfg.contains("mlp") ? mlp_from_json(cfg["mlp"]) : mlp_from_json(json::object());
        mlp.seed = seed;
        MetricSet m = feature_selection_eval(subset, inputs.train, inputs.test, mlp);
        return json{{"names", subset.names},
                    {"accuracy", m.accuracy ? *m.accuracy : 0.0},
                    {"mi_bits", subset_mi(*data.tabular, subset)}};
    };

    // in-context selection sees only a small sample, mirroring the LLM budget
    size_t selection_n = split_cfg.value("selection_n", size_t{100});
    TabularDataset selection_view = inputs.train;
    if (selection_view.rows.size() > selection_n) selection_view.rows.resize(selection_n);

    for (EvalMode mode : {EvalMode::LikelihoodOnly, EvalMode::PosteriorFull}) {
        std::string key =
            mode == EvalMode::LikelihoodOnly ? "llm_without_domain" : "llm_with_domain";
        try {
            FeatureSubset subset = llm_select_features(selection_view, k, mode, backend);
            if (mode == EvalMode::LikelihoodOnly) {
                // anonymous indices map back to schema positions
                FeatureSubset named;
                for (const auto& anon : subset.names) {
                    size_t idx = static_cast<size_t>(std::stoul(anon.substr(8)));
                    named.names.push_back(inputs.train.schema[idx].name);
                }
                subset = named;
            }
            result[key] = evaluate_subset(subset);
        } catch (const SelectionFailure& e) {
            result[key] = {{"error", e.what()}};
        }
    }

    FeatureSubset greedy = mi_greedy(*data.tabular, k);
    result["mi_greedy"] = evaluate_subset(greedy);
    if (data.tabular->n_features() <= 16) {
        FeatureSubset exhaustive = mi_exhaustive(*data.tabular, k);
        result["mi_exhaustive"] = evaluate_subset(exhaustive);
    }

    fs::create_directories(out_dir);
    write_file_atomic(out_dir + "/feature_selection.json", result.dump(2) + "\n");
    std::cout << "wrote " << out_dir << "/feature_selection.json\n";
    return 0;
}

int cmd_report(const std::string& run_dir, const std::string& out_dir) {
    std::vector<EvalReport> reports = load_run_reports(run_dir);
    if (reports.empty()) throw InvalidInput("no reports found in " + run_dir);
    fs::create_directories(out_dir);
    write_file_atomic(out_dir + "/comparison.txt", comparison_table(reports));
    write_file_atomic(out_dir + "/comparison.csv", metrics_csv(reports));

    // accuracy bar chart for classification runs, one bar per condition
    std::vector<SeriesPoint> bars;
    for (size_t i = 0; i < reports.size(); ++i)
        if (reports[i].metrics.accuracy)
            bars.push_back({static_cast<double>(i + 1), *reports[i].metrics.accuracy});
    if (!bars.empty()) {
        SvgPlot plot;
        plot.set_title("test accuracy by condition");
        plot.set_axis_labels("condition index (see comparison.txt)", "accuracy");
        plot.add_scatter(bars, "#2266cc", "accuracy", 4.0);
        plot.save(out_dir + "/accuracy.svg");
    }
    std::cout << "wrote comparison table to " << out_dir << "\n";
    return 0;
}

int cmd_plot_series(const std::string& csv, const std::string& meta, const std::string& kernels,
                    uint64_t seed, const std::string& out_dir) {
    SeriesDataset series = load_series(csv, meta);
    SeriesSplit split = split_series_by_time(series, 1980.999, 1990.0, 1992.999);
    GpRunConfig gp_run;
    gp_run.seed = seed;

    SvgPlot plot;
    plot.set_title("series extrapolation");
    plot.set_axis_labels(series.x_unit.empty() ? "x" : series.x_unit,
                         series.y_unit.empty() ? "y" : series.y_unit);
    plot.add_scatter(split.train.points, "#999999", "train", 1.5);
    plot.add_scatter(split.test.points, "#cc3322", "test", 2.0);

    std::vector<double> grid;
    for (double x = split.train.points.front().x; x <= split.test.points.back().x; x += 1.0 / 24.0)
        grid.push_back(x);

    const std::vector<std::pair<std::string, std::string>> palette = {
        {"rbf", "#777777"}, {"llm", "#2266cc"}, {"expert", "#22aa55"}};
    for (const auto& [kid, color] : palette) {
        if (kernels.find(kid) == std::string::npos) continue;
        EvalReport r = run_series_gp(kid, split, gp_run);
        std::string tuned = r.config_snapshot.at("kernel").get<std::string>();
        plot.add_line(gp_series_prediction(tuned, split, grid), color, "gp:" + kid, 1.5);
    }
    fs::create_directories(out_dir);
    plot.save(out_dir + "/series.svg");
    std::cout << "wrote " << out_dir << "/series.svg\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"function-modeling evaluation harness"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a 1-D synthetic sample set");
    std::string family = "linear", params, x_range, out_dir = "out";
    double noise_sd = 0.0;
    size_t n = 25;
    uint64_t seed = 0;
    synth->add_option("--family", family, "function family");
    synth->add_option("--params", params, "comma-separated parameters");
    synth->add_option("--x-range", x_range, "lo,hi sampling range");
    synth->add_option("--noise-sd", noise_sd, "observation noise sd");
    synth->add_option("--n", n, "number of samples");
    synth->add_option("--seed", seed, "rng seed");
    synth->add_option("--out", out_dir, "output directory")->required();

    // gen-adult
    auto* gen_adult = app.add_subcommand("gen-adult", "generate the census-style corpus");
    size_t adult_n = 12000;
    uint64_t adult_seed = 0;
    std::string adult_out = "out";
    gen_adult->add_option("--n", adult_n, "rows");
    gen_adult->add_option("--seed", adult_seed, "rng seed");
    gen_adult->add_option("--out", adult_out, "output directory")->required();

    // gen-co2
    auto* gen_co2 = app.add_subcommand("gen-co2", "generate the CO2-style series");
    double co2_start = 1958.25, co2_end = 2001.0;
    uint64_t co2_seed = 0;
    std::string co2_out = "out";
    gen_co2->add_option("--start", co2_start, "first fractional year");
    gen_co2->add_option("--end", co2_end, "last fractional year");
    gen_co2->add_option("--seed", co2_seed, "rng seed");
    gen_co2->add_option("--out", co2_out, "output directory")->required();

    // perturb
    auto* perturb = app.add_subcommand("perturb", "apply an anti-memorization recipe");
    std::string p_data, p_schema, p_meta, p_recipe = "default-adult", p_out = "out";
    bool p_series = false;
    std::optional<uint64_t> p_seed;
    uint64_t p_seed_raw = 0;
    perturb->add_option("--data", p_data, "CSV path")->required();
    perturb->add_option("--schema", p_schema, "schema sidecar (tabular)");
    perturb->add_option("--meta", p_meta, "metadata sidecar (series)");
    perturb->add_flag("--series", p_series, "treat the input as a series");
    perturb->add_option("--recipe", p_recipe, "recipe path or default-adult/default-series");
    auto* p_seed_opt = perturb->add_option("--seed", p_seed_raw, "rng seed");
    perturb->add_option("--out", p_out, "output directory")->required();

    // eval / baseline
    EvalArgs eval_args;
    uint64_t eval_seed_raw = 0;
    auto* eval = app.add_subcommand("eval", "run comparison conditions");
    eval->add_option("--config", eval_args.config_path, "run configuration JSON")->required();
    eval->add_option("--backend", eval_args.backend, "mock or live");
    eval->add_option("--mode", eval_args.mode, "raw, domain or both");
    auto* eval_seed_opt = eval->add_option("--seed", eval_seed_raw, "rng seed override");
    eval->add_option("--out", eval_args.out_dir, "run directory")->required();

    EvalArgs base_args;
    uint64_t base_seed_raw = 0;
    auto* baseline = app.add_subcommand("baseline", "run MLP/GP baselines only");
    baseline->add_option("--config", base_args.config_path, "run configuration JSON")->required();
    auto* base_seed_opt = baseline->add_option("--seed", base_seed_raw, "rng seed override");
    baseline->add_option("--out", base_args.out_dir, "run directory")->required();

    // select-features
    auto* select = app.add_subcommand("select-features", "feature selection comparison");
    std::string sel_config, sel_backend = "mock", sel_out = "out";
    size_t sel_k = 5;
    select->add_option("--config", sel_config, "run configuration JSON")->required();
    select->add_option("--k", sel_k, "subset size");
    select->add_option("--backend", sel_backend, "mock or live");
    select->add_option("--out", sel_out, "output directory")->required();

    // report
    auto* report = app.add_subcommand("report", "render comparison tables and plots");
    std::string rep_run, rep_out = "out";
    report->add_option("--run", rep_run, "run directory")->required();
    report->add_option("--out", rep_out, "output directory")->required();

    // plot-series
    auto* plot = app.add_subcommand("plot-series", "GP extrapolation overlay plot");
    std::string pl_csv, pl_meta, pl_kernels = "rbf,llm,expert", pl_out = "out";
    uint64_t pl_seed = 0;
    plot->add_option("--data", pl_csv, "series CSV")->required();
    plot->add_option("--meta", pl_meta, "metadata sidecar");
    plot->add_option("--kernels", pl_kernels, "comma list of rbf,llm,expert");
    plot->add_option("--seed", pl_seed, "rng seed");
    plot->add_option("--out", pl_out, "output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*synth) return cmd_synth(family, params, x_range, noise_sd, n, seed, out_dir);
        if (*gen_adult) return cmd_gen_adult(adult_n, adult_seed, adult_out);
        if (*gen_co2) return cmd_gen_co2(co2_start, co2_end, co2_seed, co2_out);
        if (*perturb) {
            if (p_seed_opt->count()) p_seed = p_seed_raw;
            return cmd_perturb(p_data, p_schema, p_meta, p_series, p_recipe, p_seed, p_out);
        }
        if (*eval) {
            if (eval_seed_opt->count()) eval_args.seed = eval_seed_raw;
            return cmd_eval(eval_args, false);
        }
        if (*baseline) {
            if (base_seed_opt->count()) base_args.seed = base_seed_raw;
            return cmd_eval(base_args, true);
        }
        if (*select) return cmd_select_features(sel_config, sel_k, sel_backend, sel_out);
        if (*report) return cmd_report(rep_run, rep_out);
        if (*plot) return cmd_plot_series(pl_csv, pl_meta, pl_kernels, pl_seed, pl_out);
    } catch (const std::exception& e) {
        json err = {{"error", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

} // namespace funcmod
