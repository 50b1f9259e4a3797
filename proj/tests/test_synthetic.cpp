#include <doctest.h>

#include <cmath>

#include "funcmod/errors.hpp"
#include "funcmod/synthetic.hpp"

using namespace funcmod;

TEST_CASE("closed forms match hand computations") {
    FunctionSpec linear{FunctionFamily::Linear, {2.0, 1.0}, 0, 10, 0, 0};
    CHECK(eval_function(linear, 3.0) == doctest::Approx(7.0));

    FunctionSpec sine{FunctionFamily::Sine, {1.0, 1.0, 0.0}, 0, 10, 0, 0};
    CHECK(eval_function(sine, 0.0) == doctest::Approx(0.0));

    FunctionSpec periodic{FunctionFamily::PeriodicLinear, {0.5, 1.0, 2.0 * M_PI}, 0, 10, 0, 0};
    CHECK(eval_function(periodic, 1.0) == doctest::Approx(0.5));

    FunctionSpec quad{FunctionFamily::Quadratic, {1.0, -2.0, 1.0}, 0, 10, 0, 0};
    CHECK(eval_function(quad, 3.0) == doctest::Approx(4.0));

    FunctionSpec step{FunctionFamily::Step, {5.0, -1.0, 2.0}, 0, 10, 0, 0};
    CHECK(eval_function(step, 4.9) == -1.0);
    CHECK(eval_function(step, 5.0) == 2.0);

    FunctionSpec pw{FunctionFamily::Piecewise, {5.0, 1.0, 0.0, -1.0, 10.0}, 0, 10, 0, 0};
    CHECK(eval_function(pw, 2.0) == doctest::Approx(2.0));
    CHECK(eval_function(pw, 6.0) == doctest::Approx(4.0));

    FunctionSpec expf{FunctionFamily::Exponential, {2.0, 0.5}, 0, 10, 0, 0};
    CHECK(eval_function(expf, 2.0) == doctest::Approx(2.0 * std::exp(1.0)));

    FunctionSpec logf{FunctionFamily::Logarithmic, {2.0, 1.0}, 0.1, 10, 0, 0};
    CHECK(eval_function(logf, std::exp(1.0)) == doctest::Approx(3.0));

    FunctionSpec power{FunctionFamily::PowerLaw, {2.0, 2.0}, 0, 10, 0, 0};
    CHECK(eval_function(power, 3.0) == doctest::Approx(18.0));

    FunctionSpec gauss{FunctionFamily::Gaussian, {3.0, 5.0, 1.5}, 0, 10, 0, 0};
    CHECK(eval_function(gauss, 5.0) == doctest::Approx(3.0));
}

TEST_CASE("domain violations raise DomainError") {
    FunctionSpec logf{FunctionFamily::Logarithmic, {1.0, 0.0}, 0.1, 10, 0, 0};
    CHECK_THROWS_AS(eval_function(logf, -1.0), DomainError);
    CHECK_THROWS_AS(eval_function(logf, 0.0), DomainError);
    FunctionSpec power{FunctionFamily::PowerLaw, {1.0, 0.5}, 0, 10, 0, 0};
    CHECK_THROWS_AS(eval_function(power, -0.5), DomainError);
}

TEST_CASE("spec validation enforces family domains and arity") {
    FunctionSpec bad{FunctionFamily::Logarithmic, {1.0, 0.0}, 0.0, 10, 0, 0};
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    FunctionSpec arity{FunctionFamily::Linear, {1.0}, 0, 10, 0, 0};
    CHECK_THROWS_AS(arity.validate(), InvalidInput);
    FunctionSpec negnoise{FunctionFamily::Linear, {1.0, 1.0}, 0, 10, -0.1, 0};
    CHECK_THROWS_AS(negnoise.validate(), InvalidInput);
    CHECK_THROWS_AS(family_from_string("cubic_spline"), InvalidInput);
}

TEST_CASE("exactly ten families are constructible") {
    const char* names[] = {"linear",   "quadratic", "logarithmic", "sine",       "power_law",
                           "gaussian", "piecewise", "step",        "exponential", "periodic_linear"};
    for (const char* n : names) {
        FunctionSpec spec = default_spec(family_from_string(n));
        CHECK_NOTHROW(spec.validate());
        CHECK(to_string(spec.family) == n);
    }
}

TEST_CASE("evenly spaced sampling covers the range endpoints") {
    FunctionSpec spec = default_spec(FunctionFamily::Linear);
    spec.x_lo = 0.0;
    spec.x_hi = 1.0;
    SampleSet s = gen_sampleset(spec, 25);
    REQUIRE(s.points.size() == 25);
    CHECK(s.points.front().x == doctest::Approx(0.0));
    CHECK(s.points.back().x == doctest::Approx(1.0));
    // equal spacing within 1e-12
    double step = s.points[1].x - s.points[0].x;
    CHECK(step == doctest::Approx(1.0 / 24.0));
    for (size_t i = 1; i < s.points.size(); ++i)
        CHECK(std::abs((s.points[i].x - s.points[i - 1].x) - step) < 1e-12);
}

TEST_CASE("zero noise points lie exactly on the function") {
    FunctionSpec spec = default_spec(FunctionFamily::Quadratic);
    spec.noise_sd = 0.0;
    SampleSet s = gen_sampleset(spec, 25);
    for (const auto& p : s.points) CHECK(p.y == doctest::Approx(eval_function(spec, p.x)));
}

TEST_CASE("residual spread matches the requested noise level") {
    FunctionSpec spec = default_spec(FunctionFamily::Linear);
    spec.noise_sd = 0.1;
    spec.seed = 6;
    SampleSet s = gen_sampleset(spec, 10000);
    double sum = 0, sum2 = 0;
    for (const auto& p : s.points) {
        double r = p.y - eval_function(spec, p.x);
        sum += r;
        sum2 += r * r;
    }
    double n = double(s.points.size());
    double sd = std::sqrt(sum2 / n - (sum / n) * (sum / n));
    CHECK(sd >= 0.095);
    CHECK(sd <= 0.105);
}

TEST_CASE("same spec and seed give bit-identical samples") {
    FunctionSpec spec = default_spec(FunctionFamily::Sine);
    spec.noise_sd = 0.3;
    spec.seed = 12;
    SampleSet a = gen_sampleset(spec, 50);
    SampleSet b = gen_sampleset(spec, 50);
    for (size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].x == b.points[i].x);
        CHECK(a.points[i].y == b.points[i].y);
    }
    spec.seed = 13;
    SampleSet c = gen_sampleset(spec, 50);
    bool differ = false;
    for (size_t i = 0; i < a.points.size() && !differ; ++i) differ = a.points[i].y != c.points[i].y;
    CHECK(differ);
}

TEST_CASE("synthetic tasks carry the generic template and hidden truth") {
    FunctionSpec spec{FunctionFamily::Linear, {2.0, 1.0}, 0, 10, 0, 4};
    SyntheticTask task = make_synthetic_task(spec, {0.5, 2.5, 9.0}, 25);
    CHECK(task.train.rows.size() == 25);
    CHECK(task.task.text.find("linear") == std::string::npos);
    CHECK(task.task.mode_tag == EvalMode::LikelihoodOnly);
    REQUIRE(task.truth.size() == 3);
    CHECK(task.truth[0] == doctest::Approx(2.0));
    CHECK(task.truth[1] == doctest::Approx(6.0));
    CHECK(task.truth[2] == doctest::Approx(19.0));
    CHECK_THROWS_AS(make_synthetic_task(spec, {11.0}, 25), InvalidInput);
}

TEST_CASE("function specs round-trip through JSON") {
    FunctionSpec spec = default_spec(FunctionFamily::Gaussian);
    spec.noise_sd = 0.25;
    spec.seed = 99;
    FunctionSpec back = spec_from_json(spec_to_json(spec));
    CHECK(back.family == spec.family);
    CHECK(back.params == spec.params);
    CHECK(back.noise_sd == spec.noise_sd);
    CHECK(back.seed == spec.seed);
}
