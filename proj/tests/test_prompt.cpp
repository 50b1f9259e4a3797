#include <doctest.h>

#include "funcmod/corpus.hpp"
#include "funcmod/errors.hpp"
#include "funcmod/prompt.hpp"
#include "funcmod/transforms.hpp"

using namespace funcmod;

namespace {

// two-feature numerized classification set mirroring the worked layout
TabularDataset tiny_numerized() {
    TabularDataset ds;
    FeatureSchema f0, f1;
    f0.name = "feature 0";
    f1.name = "feature 1";
    ds.schema = {f0, f1};
    ds.target_schema.name = "class";
    ds.target_schema.categorical = true;
    ds.target_schema.levels = {"0", "1"};
    Example a;
    a.features = {1.0, 0.33};
    a.target = std::string("0");
    Example b;
    b.features = {0.4, 0.24};
    b.target = std::string("1");
    ds.rows = {a, b};
    return ds;
}

TabularDataset tiny_verbal() {
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
    Example a;
    a.features = {std::string("PhD"), 33.0};
    a.target = std::string("high income");
    Example b;
    b.features = {std::string("B.A"), 24.0};
    b.target = std::string("low income");
    ds.rows = {a, b};
    return ds;
}

} // namespace

TEST_CASE("likelihood prompts match the worked layout") {
    TabularDataset ds = tiny_numerized();
    TaskDescription task;
    task.kind = TaskKind::Classification;
    task = decontextualize(task);

    Example query;
    query.features = {0.6, 0.55};
    query.target = std::string("0");
    PromptBundle bundle = build_prompt(EvalMode::LikelihoodOnly, ds, task, query);
    std::string text = bundle.full_text();

    CHECK(text.find("example 1, features: [1.0, 0.33], class 0") != std::string::npos);
    CHECK(text.find("example 2, features: [0.4, 0.24], class 1") != std::string::npos);
    CHECK(text.find("Now predict the class for the data below:") != std::string::npos);
    CHECK(text.find("example x, features: [0.6, 0.55], class=?") != std::string::npos);
    CHECK(text.find("ANSWER:") != std::string::npos);
    CHECK(!bundle.hint);
}

TEST_CASE("posterior prompts carry the hint and verbal cells") {
    TabularDataset ds = tiny_verbal();
    ContextBlock ctx;
    ctx.domain_name = "income prediction";
    ctx.task_prose = "Below you are asked to predict whether the individual has a high income.";
    TaskDescription task;
    task.kind = TaskKind::Classification;
    task = contextualize(task, ctx);

    Example query;
    query.features = {std::string("MSc"), 55.0};
    query.target = std::string("low income");
    PromptBundle bundle = build_prompt(EvalMode::PosteriorFull, ds, task, query);
    std::string text = bundle.full_text();

    CHECK(text.find("case 1, education=PhD, age=33, high income") != std::string::npos);
    CHECK(text.find("case 2, education=B.A, age=24, low income") != std::string::npos);
    CHECK(text.find("Now predict the income for the case below:") != std::string::npos);
    CHECK(text.find("case x, education=MSc, age=55, income=?") != std::string::npos);
    CHECK(text.find("actively utilize any domain knowledge") != std::string::npos);
    CHECK(text.find("actively make use of any domain knowledge") != std::string::npos);
}

TEST_CASE("zero in-context examples omit the examples block") {
    TabularDataset ds = tiny_numerized();
    ds.rows.clear();
    TaskDescription task;
    task.kind = TaskKind::Classification;
    task = decontextualize(task);
    Example query;
    query.features = {0.6, 0.55};
    query.target = std::string("0");
    PromptBundle bundle = build_prompt(EvalMode::LikelihoodOnly, ds, task, query);
    std::string text = bundle.full_text();
    CHECK(text.find("Below are a few examples") == std::string::npos);
    CHECK(text.find("-----") == std::string::npos);
    CHECK(text.find("example x,") != std::string::npos);
}

TEST_CASE("mode violations are rejected") {
    TabularDataset verbal = tiny_verbal();
    TaskDescription generic;
    generic.kind = TaskKind::Classification;
    generic = decontextualize(generic);
    Example query;
    query.features = {std::string("MSc"), 55.0};
    query.target = std::string("low income");
    // verbal features under likelihood-only
    CHECK_THROWS_AS(build_prompt(EvalMode::LikelihoodOnly, verbal, generic, query), ModeViolation);

    // hint in likelihood mode
    TabularDataset numer = tiny_numerized();
    TaskDescription hinted = generic;
    hinted.hint = "use your knowledge";
    Example nq;
    nq.features = {0.5, 0.5};
    nq.target = std::string("0");
    CHECK_THROWS_AS(build_prompt(EvalMode::LikelihoodOnly, numer, hinted, nq), ModeViolation);

    // numerized data under posterior mode
    ContextBlock ctx;
    ctx.domain_name = "income";
    ctx.task_prose = "predict";
    TaskDescription posterior;
    posterior.kind = TaskKind::Classification;
    posterior = contextualize(posterior, ctx);
    CHECK_THROWS_AS(build_prompt(EvalMode::PosteriorFull, numer, posterior, nq), ModeViolation);

    // task tag disagrees with the requested mode
    CHECK_THROWS_AS(build_prompt(EvalMode::PosteriorFull, verbal, generic, query), ModeViolation);
}

TEST_CASE("likelihood prompts over the census corpus pass the blocklist scan") {
    TabularDataset ds = make_adultlike(40, 3);
    Blocklist bl = Blocklist::for_dataset(ds);
    NumerizedDataset nd = numerize(ds);
    TaskDescription task;
    task.kind = TaskKind::Classification;
    task = decontextualize(task);
    PromptBundle bundle =
        build_prompt(EvalMode::LikelihoodOnly, nd.data, task, nd.data.rows.front());
    CHECK(bl.hits(bundle.full_text()).empty());
}

TEST_CASE("prompt rendering is a pure function") {
    TabularDataset ds = tiny_numerized();
    TaskDescription task;
    task.kind = TaskKind::Classification;
    task = decontextualize(task);
    Example query;
    query.features = {0.6, 0.55};
    query.target = std::string("0");
    std::string a = build_prompt(EvalMode::LikelihoodOnly, ds, task, query).full_text();
    std::string b = build_prompt(EvalMode::LikelihoodOnly, ds, task, query).full_text();
    CHECK(a == b);
}

TEST_CASE("regression prompts end with y=?") {
    TabularDataset ds;
    FeatureSchema f;
    f.name = "feature 0";
    ds.schema = {f};
    ds.target_schema.name = "y";
    Example a;
    a.features = {0.0};
    a.target = 0.0;
    Example b;
    b.features = {1.0};
    b.target = 2.0;
    ds.rows = {a, b};
    TaskDescription task;
    task.kind = TaskKind::Regression;
    task = decontextualize(task);
    Example q;
    q.features = {0.5};
    q.target = 0.0;
    std::string text = build_prompt(EvalMode::LikelihoodOnly, ds, task, q).full_text();
    CHECK(text.find("y 0.0") != std::string::npos);
    CHECK(text.find("y 2.0") != std::string::npos);
    CHECK(text.find("y=?") != std::string::npos);
}

TEST_CASE("feature formatting trims to the worked style") {
    CHECK(format_feature01(1.0) == "1.0");
    CHECK(format_feature01(0.4) == "0.4");
    CHECK(format_feature01(0.33) == "0.33");
    CHECK(format_feature01(0.0) == "0.0");
    CHECK(format_feature01(0.256) == "0.26");
    CHECK(format_feature01(-0.5) == "-0.5");
}

TEST_CASE("selection prompt lists candidates and k") {
    TabularDataset ds = tiny_verbal();
    TaskDescription task;
    task.kind = TaskKind::Classification;
    ContextBlock ctx;
    ctx.domain_name = "income";
    ctx.task_prose = "predict income";
    task = contextualize(task, ctx);
    std::string text = build_selection_prompt(ds, 2, task);
    CHECK(text.find("The candidate features are: education; age.") != std::string::npos);
    CHECK(text.find("choose the 2 features") != std::string::npos);
    CHECK_THROWS_AS(build_selection_prompt(ds, 0, task), InvalidInput);
    CHECK_THROWS_AS(build_selection_prompt(ds, 3, task), InvalidInput);
}
