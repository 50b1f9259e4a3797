#include <doctest.h>

#include "funcmod/errors.hpp"
#include "funcmod/extract.hpp"
#include "funcmod/mock.hpp"
#include "funcmod/prompt.hpp"
#include "funcmod/rng.hpp"
#include "funcmod/transforms.hpp"

using namespace funcmod;

namespace {

TabularDataset regression_1d(const std::vector<std::pair<double, double>>& pts) {
    TabularDataset ds;
    FeatureSchema f;
    f.name = "feature 0";
    ds.schema = {f};
    ds.target_schema.name = "y";
    for (auto [x, y] : pts) {
        Example ex;
        ex.features = {x};
        ex.target = y;
        ds.rows.push_back(ex);
    }
    return ds;
}

std::string regression_prompt(const TabularDataset& ds, double query_x) {
    TaskDescription task;
    task.kind = TaskKind::Regression;
    task = decontextualize(task);
    Example q;
    q.features = {query_x};
    q.target = 0.0;
    return build_prompt(EvalMode::LikelihoodOnly, ds, task, q).full_text();
}

} // namespace

TEST_CASE("nearest neighbor answers the regression query") {
    TabularDataset ds = regression_1d({{0.0, 0.0}, {1.0, 1.0}});
    LlmResponse r = mock_complete(regression_prompt(ds, 0.9));
    Prediction p = extract(r.raw_text, ExpectKind::Real);
    REQUIRE(p.ok);
    CHECK(p.value == doctest::Approx(1.0));
}

TEST_CASE("a query on a training point returns that training value") {
    TabularDataset ds = regression_1d({{0.0, 0.25}, {0.5, 0.75}, {1.0, 0.5}});
    LlmResponse r = mock_complete(regression_prompt(ds, 0.5));
    Prediction p = extract(r.raw_text, ExpectKind::Real);
    REQUIRE(p.ok);
    CHECK(p.value == 0.75);
}

TEST_CASE("regression distance ties go to the lower x") {
    TabularDataset ds = regression_1d({{0.0, 5.0}, {1.0, 9.0}});
    LlmResponse r = mock_complete(regression_prompt(ds, 0.5));
    Prediction p = extract(r.raw_text, ExpectKind::Real);
    REQUIRE(p.ok);
    CHECK(p.value == doctest::Approx(5.0));
}

TEST_CASE("3-NN majority classifies a separable set perfectly") {
    TabularDataset ds;
    FeatureSchema f0, f1;
    f0.name = "feature 0";
    f1.name = "feature 1";
    ds.schema = {f0, f1};
    ds.target_schema.name = "class";
    ds.target_schema.categorical = true;
    ds.target_schema.levels = {"0", "1"};
    Rng rng(4);
    for (int i = 0; i < 30; ++i) {
        Example ex;
        bool right = i % 2;
        double cx = right ? 0.8 : 0.2;
        ex.features = {cx + 0.05 * rng.normal(2 * i), 0.5 + 0.05 * rng.normal(2 * i + 1)};
        ex.target = std::string(right ? "1" : "0");
        ds.rows.push_back(ex);
    }
    TaskDescription task;
    task.kind = TaskKind::Classification;
    task = decontextualize(task);

    // independent brute-force 3-NN over the same normalized space agrees on
    // every training point
    for (const auto& row : ds.rows) {
        PromptBundle bundle = build_prompt(EvalMode::LikelihoodOnly, ds, task, row);
        LlmResponse r = mock_complete(bundle.full_text());
        Prediction p = extract(r.raw_text, ExpectKind::ClassLabel, {"0", "1"});
        REQUIRE(p.ok);
        CHECK(p.label == as_text(row.target));
    }
}

TEST_CASE("posterior prompts with verbal features are handled") {
    TabularDataset ds;
    FeatureSchema edu, age;
    edu.name = "education";
    edu.categorical = true;
    edu.levels = {"B.A", "MSc", "PhD"};
    age.name = "age";
    ds.schema = {edu, age};
    ds.target_schema.name = "income";
    ds.target_schema.categorical = true;
    ds.target_schema.levels = {"low income", "high income"};
    auto add = [&](const char* e, double a, const char* t) {
        Example ex;
        ex.features = {std::string(e), a};
        ex.target = std::string(t);
        ds.rows.push_back(ex);
    };
    add("PhD", 53, "high income");
    add("PhD", 45, "high income");
    add("PhD", 50, "high income");
    add("B.A", 24, "low income");
    add("B.A", 28, "low income");
    add("B.A", 22, "low income");

    ContextBlock ctx;
    ctx.domain_name = "income";
    ctx.task_prose = "Predict whether the individual has a high income.";
    TaskDescription task;
    task.kind = TaskKind::Classification;
    task = contextualize(task, ctx);

    Example q;
    q.features = {std::string("PhD"), 49.0};
    q.target = std::string("low income");
    PromptBundle bundle = build_prompt(EvalMode::PosteriorFull, ds, task, q);
    LlmResponse r = mock_complete(bundle.full_text());
    Prediction p = extract(r.raw_text, ExpectKind::ClassLabel, {"low income", "high income"});
    REQUIRE(p.ok);
    CHECK(p.label == "high income");
}

TEST_CASE("every built prompt yields an extractable answer") {
    Rng rng(11);
    TaskDescription reg;
    reg.kind = TaskKind::Regression;
    reg = decontextualize(reg);
    for (uint64_t trial = 0; trial < 50; ++trial) {
        Rng t = rng.split(trial);
        size_t n = 2 + size_t(t.uniform_int(0, 0, 20));
        std::vector<std::pair<double, double>> pts;
        for (size_t i = 0; i < n; ++i)
            pts.push_back({t.uniform(2 * i, 0, 1), t.uniform(2 * i + 1, -5, 5)});
        TabularDataset ds = regression_1d(pts);
        std::string prompt = regression_prompt(ds, t.uniform(999, 0, 1));
        LlmResponse r = mock_complete(prompt);
        Prediction p = extract(r.raw_text, ExpectKind::Real);
        CHECK(p.ok);
    }
}

TEST_CASE("selection prompts get the first k candidates") {
    TabularDataset ds;
    for (const char* name : {"alpha", "beta", "gamma", "delta"}) {
        FeatureSchema f;
        f.name = name;
        ds.schema.push_back(f);
    }
    ds.target_schema.name = "y";
    ds.target_schema.categorical = true;
    ds.target_schema.levels = {"0", "1"};
    Example ex;
    ex.features = {1.0, 2.0, 3.0, 4.0};
    ex.target = std::string("0");
    ds.rows.push_back(ex);

    TaskDescription task;
    task.kind = TaskKind::Classification;
    task = decontextualize(task);
    std::string prompt = build_selection_prompt(ds, 2, task);
    LlmResponse r = mock_complete(prompt);
    CHECK(r.raw_text.find("ANSWER: alpha, beta") != std::string::npos);
}

TEST_CASE("rules prompts return enumerated text") {
    TabularDataset ds = regression_1d({{0.0, 1.0}, {1.0, 2.0}});
    TaskDescription task;
    task.kind = TaskKind::Regression;
    task = decontextualize(task);
    Example q;
    q.features = {0.5};
    q.target = 0.0;
    PromptBundle bundle = build_prompt(EvalMode::LikelihoodOnly, ds, task, q);
    LlmResponse r = mock_complete(build_rules_prompt(bundle));
    CHECK(r.raw_text.find("1.") != std::string::npos);
}

TEST_CASE("prompts without data fail loudly") {
    CHECK_THROWS_AS(mock_complete("tell me a story"), MockParseFailure);
    TabularDataset ds = regression_1d({});
    CHECK_THROWS_AS(mock_complete(regression_prompt(ds, 0.5)), MockParseFailure);
}
