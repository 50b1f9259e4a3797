#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "funcmod/dataset.hpp"
#include "funcmod/transforms.hpp"

namespace funcmod {

enum class FunctionFamily {
    Linear,
    Quadratic,
    Logarithmic,
    Sine,
    PowerLaw,
    Gaussian,
    Piecewise,
    Step,
    Exponential,
    PeriodicLinear,
};

std::string to_string(FunctionFamily family);
FunctionFamily family_from_string(const std::string& name); // throws InvalidInput

// One 1-D function with its sampling window.
//
// Parameter layout per family:
//   Linear         {a, b}               a*x + b
//   Quadratic      {a, b, c}            a*x^2 + b*x + c
//   Logarithmic    {a, b}               a*ln(x) + b          (x > 0)
//   Sine           {A, omega, phi}      A*sin(omega*x + phi)
//   PowerLaw       {a, p}               a*x^p                (x >= 0)
//   Gaussian       {A, mu, sigma}       A*exp(-(x-mu)^2 / (2*sigma^2))
//   Piecewise      {t, a1, b1, a2, b2}  a1*x+b1 below t, a2*x+b2 at or above
//   Step           {t, c1, c2}          c1 below t, c2 at or above
//   Exponential    {a, b}               a*exp(b*x)
//   PeriodicLinear {a, b, omega}        a*x + b*sin(omega*x)
struct FunctionSpec {
    FunctionFamily family = FunctionFamily::Linear;
    std::vector<double> params;
    double x_lo = 0.0;
    double x_hi = 10.0;
    double noise_sd = 0.0;
    uint64_t seed = 0;

    void validate() const;
};

FunctionSpec default_spec(FunctionFamily family);

double eval_function(const FunctionSpec& spec, double x);

struct SampleSet {
    FunctionSpec spec;
    std::vector<SeriesPoint> points;
};

// n x values, evenly spaced over [x_lo, x_hi] by default or uniform-random
// with random_x; y = f(x) + N(0, noise_sd^2), one counter per point.
SampleSet gen_sampleset(const FunctionSpec& spec, size_t n = 25, bool random_x = false);

struct SyntheticTask {
    TabularDataset train;        // 1-D regression dataset (the in-context set)
    TaskDescription task;        // decontextualized regression template
    std::vector<double> query_xs;
    std::vector<double> truth;   // noiseless ground truth at the queries
    FunctionSpec spec;
};

SyntheticTask make_synthetic_task(const FunctionSpec& spec, const std::vector<double>& query_xs,
                                  size_t n = 25);

std::string spec_to_json(const FunctionSpec& spec);
FunctionSpec spec_from_json(const std::string& text);

} // namespace funcmod
