#include "funcmod/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "funcmod/errors.hpp"
#include "funcmod/rng.hpp"

namespace funcmod {

using nlohmann::json;

std::string to_string(FunctionFamily family) {
    switch (family) {
    case FunctionFamily::Linear: return "linear";
    case FunctionFamily::Quadratic: return "quadratic";
    case FunctionFamily::Logarithmic: return "logarithmic";
    case FunctionFamily::Sine: return "sine";
    case FunctionFamily::PowerLaw: return "power_law";
    case FunctionFamily::Gaussian: return "gaussian";
    case FunctionFamily::Piecewise: return "piecewise";
    case FunctionFamily::Step: return "step";
    case FunctionFamily::Exponential: return "exponential";
    case FunctionFamily::PeriodicLinear: return "periodic_linear";
    }
    throw InvalidInput("unknown function family tag");
}

FunctionFamily family_from_string(const std::string& name) {
    static const std::vector<FunctionFamily> all = {
        FunctionFamily::Linear,       FunctionFamily::Quadratic, FunctionFamily::Logarithmic,
        FunctionFamily::Sine,         FunctionFamily::PowerLaw,  FunctionFamily::Gaussian,
        FunctionFamily::Piecewise,    FunctionFamily::Step,      FunctionFamily::Exponential,
        FunctionFamily::PeriodicLinear};
    for (auto f : all)
        if (to_string(f) == name) return f;
    throw InvalidInput("unknown function family '" + name + "'");
}

namespace {

size_t arity(FunctionFamily family) {
    switch (family) {
    case FunctionFamily::Linear: return 2;
    case FunctionFamily::Quadratic: return 3;
    case FunctionFamily::Logarithmic: return 2;
    case FunctionFamily::Sine: return 3;
    case FunctionFamily::PowerLaw: return 2;
    case FunctionFamily::Gaussian: return 3;
    case FunctionFamily::Piecewise: return 5;
    case FunctionFamily::Step: return 3;
    case FunctionFamily::Exponential: return 2;
    case FunctionFamily::PeriodicLinear: return 3;
    }
    return 0;
}

} // namespace

void FunctionSpec::validate() const {
    if (params.size() != arity(family))
        throw InvalidInput("family " + to_string(family) + " takes " +
                           std::to_string(arity(family)) + " parameters, got " +
                           std::to_string(params.size()));
    if (!(x_lo < x_hi)) throw InvalidInput("x_range must satisfy lo < hi");
    if (noise_sd < 0) throw InvalidInput("noise_sd must be >= 0");
    if (family == FunctionFamily::Logarithmic && x_lo <= 0)
        throw InvalidInput("logarithmic family requires x_lo > 0");
    if (family == FunctionFamily::PowerLaw && x_lo < 0)
        throw InvalidInput("power-law family requires x_lo >= 0");
    if (family == FunctionFamily::Gaussian && params[2] <= 0)
        throw InvalidInput("gaussian family requires sigma > 0");
}

double eval_function(const FunctionSpec& spec, double x) {
    const auto& p = spec.params;
    switch (spec.family) {
    case FunctionFamily::Linear: return p[0] * x + p[1];
    case FunctionFamily::Quadratic: return p[0] * x * x + p[1] * x + p[2];
    case FunctionFamily::Logarithmic:
        if (x <= 0) throw DomainError("log of non-positive x");
        return p[0] * std::log(x) + p[1];
    case FunctionFamily::Sine: return p[0] * std::sin(p[1] * x + p[2]);
    case FunctionFamily::PowerLaw:
        if (x < 0) throw DomainError("power law needs x >= 0");
        return p[0] * std::pow(x, p[1]);
    case FunctionFamily::Gaussian: {
        double d = (x - p[1]) / p[2];
        return p[0] * std::exp(-0.5 * d * d);
    }
    case FunctionFamily::Piecewise: return x < p[0] ? p[1] * x + p[2] : p[3] * x + p[4];
    case FunctionFamily::Step: return x < p[0] ? p[1] : p[2];
    case FunctionFamily::Exponential: return p[0] * std::exp(p[1] * x);
    case FunctionFamily::PeriodicLinear: return p[0] * x + p[1] * std::sin(p[2] * x);
    }
    throw InvalidInput("unknown function family tag");
}

FunctionSpec default_spec(FunctionFamily family) {
    FunctionSpec s;
    s.family = family;
    s.x_lo = 0.0;
    s.x_hi = 10.0;
    switch (family) {
    case FunctionFamily::Linear: s.params = {1.5, 0.5}; break;
    case FunctionFamily::Quadratic: s.params = {0.4, -2.0, 1.0}; break;
    case FunctionFamily::Logarithmic:
        s.params = {2.0, 1.0};
        s.x_lo = 0.1;
        break;
    case FunctionFamily::Sine: s.params = {2.0, 2.0, 0.0}; break;
    case FunctionFamily::PowerLaw: s.params = {1.0, 1.7}; break;
    case FunctionFamily::Gaussian: s.params = {3.0, 5.0, 1.5}; break;
    case FunctionFamily::Piecewise: s.params = {5.0, 1.0, 0.0, -0.5, 7.5}; break;
    case FunctionFamily::Step: s.params = {5.0, -1.0, 2.0}; break;
    case FunctionFamily::Exponential: s.params = {0.5, 0.4}; break;
    case FunctionFamily::PeriodicLinear: s.params = {0.5, 2.0, 2.0 * M_PI}; break;
    }
    return s;
}

SampleSet gen_sampleset(const FunctionSpec& spec, size_t n, bool random_x) {
    spec.validate();
    if (n < 2) throw InvalidInput("need at least 2 samples");
    SampleSet out;
    out.spec = spec;
    out.points.resize(n);

    Rng xs = Rng(spec.seed).split("x");
    Rng noise = Rng(spec.seed).split("noise");
    for (size_t i = 0; i < n; ++i) {
        double x;
        if (random_x) {
            x = xs.uniform(i, spec.x_lo, spec.x_hi);
        } else {
            double t = static_cast<double>(i) / static_cast<double>(n - 1);
            x = spec.x_lo + t * (spec.x_hi - spec.x_lo);
        }
        double y = eval_function(spec, x);
        if (spec.noise_sd > 0) y += noise.normal(i, 0.0, spec.noise_sd);
        out.points[i] = {x, y};
    }
    if (random_x) {
        std::sort(out.points.begin(), out.points.end(),
                  [](const SeriesPoint& a, const SeriesPoint& b) { return a.x < b.x; });
    }
    return out;
}

SyntheticTask make_synthetic_task(const FunctionSpec& spec, const std::vector<double>& query_xs,
                                  size_t n) {
    for (double q : query_xs)
        if (q < spec.x_lo || q > spec.x_hi)
            throw InvalidInput("query x outside the sampling range");

    SyntheticTask task;
    task.spec = spec;
    task.query_xs = query_xs;

    SampleSet samples = gen_sampleset(spec, n);
    SeriesDataset series;
    series.points = samples.points;
    task.train = series_to_tabular(series);

    TaskDescription original;
    original.kind = TaskKind::Regression;
    original.text = "predict y from x";
    task.task = decontextualize(original);

    for (double q : query_xs) task.truth.push_back(eval_function(spec, q));
    return task;
}

std::string spec_to_json(const FunctionSpec& spec) {
    json j;
    j["family"] = to_string(spec.family);
    j["params"] = spec.params;
    j["x_range"] = {spec.x_lo, spec.x_hi};
    j["noise_sd"] = spec.noise_sd;
    j["seed"] = spec.seed;
    return j.dump(2) + "\n";
}

FunctionSpec spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("bad function spec JSON: ") + e.what());
    }
    FunctionSpec s;
    s.family = family_from_string(j.at("family").get<std::string>());
    s.params = j.at("params").get<std::vector<double>>();
    if (j.contains("x_range")) {
        s.x_lo = j["x_range"][0].get<double>();
        s.x_hi = j["x_range"][1].get<double>();
    }
    s.noise_sd = j.value("noise_sd", 0.0);
    s.seed = j.value("seed", uint64_t{0});
    s.validate();
    return s;
}

} // namespace funcmod
