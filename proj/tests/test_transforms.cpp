#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "funcmod/corpus.hpp"
#include "funcmod/errors.hpp"
#include "funcmod/transforms.hpp"

using namespace funcmod;

namespace {

// education at the top of 16 ordered levels plus an age column spanning [0,100]
TabularDataset paper_example_dataset() {
    TabularDataset ds;
    FeatureSchema edu;
    edu.name = "education";
    edu.categorical = true;
    for (int i = 0; i < 15; ++i) edu.levels.push_back("level-" + std::to_string(i));
    edu.levels.push_back("PhD");
    FeatureSchema age;
    age.name = "age";
    age.unit = "years";
    ds.schema = {edu, age};
    ds.target_schema.name = "income";
    ds.target_schema.categorical = true;
    ds.target_schema.levels = {"low income", "high income"};

    auto add = [&](const std::string& e, double a, const std::string& t) {
        Example ex;
        ex.features = {e, a};
        ex.target = t;
        ds.rows.push_back(ex);
    };
    add("level-0", 0.0, "low income");
    add("PhD", 33.0, "high income");
    add("level-8", 100.0, "low income");
    return ds;
}

} // namespace

TEST_CASE("numerize reproduces the PhD/age encoding") {
    NumerizedDataset nd = numerize(paper_example_dataset());
    // row 1: {education=PhD, age=33} -> [1.0, 0.33]
    CHECK(as_number(nd.data.rows[1].features[0]) == doctest::Approx(1.0));
    CHECK(as_number(nd.data.rows[1].features[1]) == doctest::Approx(0.33));
    // anonymous names, stripped semantics
    CHECK(nd.data.schema[0].name == "feature 0");
    CHECK(nd.data.schema[1].name == "feature 1");
    CHECK(nd.data.schema[1].unit.empty());
    // classification target becomes class indices
    CHECK(as_text(nd.data.rows[1].target) == "1");
    CHECK(nd.data.target_schema.name == "class");
}

TEST_CASE("binary categorical maps no->0 yes->1") {
    TabularDataset ds;
    FeatureSchema f;
    f.name = "flag";
    f.categorical = true;
    f.levels = {"no", "yes"};
    ds.schema = {f};
    ds.target_schema.name = "y";
    for (const char* v : {"no", "yes"}) {
        Example ex;
        ex.features = {std::string(v)};
        ex.target = 0.0;
        ds.rows.push_back(ex);
    }
    NumerizedDataset nd = numerize(ds);
    CHECK(as_number(nd.data.rows[0].features[0]) == 0.0);
    CHECK(as_number(nd.data.rows[1].features[0]) == 1.0);
}

TEST_CASE("numerize leaves no original schema strings behind") {
    TabularDataset ds = make_adultlike(60, 3);
    Blocklist bl = Blocklist::for_dataset(ds);
    NumerizedDataset nd = numerize(ds);

    std::string everything = tabular_to_csv(nd.data) + schema_to_json(nd.data);
    CHECK(bl.hits(everything).empty());
    // training rows stay pinned to [0,1]
    for (const auto& row : nd.data.rows)
        for (const auto& v : row.features) {
            CHECK(as_number(v) >= 0.0);
            CHECK(as_number(v) <= 1.0);
        }
}

TEST_CASE("unknown level raises InvalidData") {
    TabularDataset ds = paper_example_dataset();
    NumerizedDataset nd = numerize(ds);
    TabularDataset other = ds;
    other.rows[0].features[0] = std::string("made-up");
    CHECK_THROWS_AS(apply_numerize(other, nd.info), InvalidData);
}

TEST_CASE("decontextualize emits the fixed templates and is idempotent") {
    TaskDescription ball;
    ball.kind = TaskKind::Regression;
    ball.text = "we would like to predict the trajectory of a ball given its past trajectory";
    ball.hint = "think of physics";
    ball.mode_tag = EvalMode::PosteriorFull;

    TaskDescription generic = decontextualize(ball);
    CHECK(generic.text == "this is a regression task where we predict y from x given some training data");
    CHECK(generic.mode_tag == EvalMode::LikelihoodOnly);
    CHECK(!generic.hint);

    TaskDescription again = decontextualize(generic);
    CHECK(again.text == generic.text);

    TaskDescription cls;
    cls.kind = TaskKind::Classification;
    cls.text = "predict income";
    TaskDescription generic_cls = decontextualize(cls);
    CHECK(generic_cls.text.find("predict the class (0 or 1) given the features") != std::string::npos);
}

TEST_CASE("decontextualized income task passes the blocklist scan") {
    TabularDataset ds = make_adultlike(30, 5);
    Blocklist bl = Blocklist::for_dataset(ds);
    TaskDescription t;
    t.kind = TaskKind::Classification;
    t.text = "predict whether the individual has a high income";
    TaskDescription generic = decontextualize(t);
    CHECK(bl.clean(generic.text));
    CHECK(!bl.clean(t.text)); // the original obviously fails
}

TEST_CASE("verbalize decodes codes back to level strings and integers") {
    // {1, 'married', 27} -> Gender=Female, Marriage status=married, Age=27
    TabularDataset coded;
    FeatureSchema g;
    g.name = "gender-code";
    FeatureSchema m;
    m.name = "marriage";
    m.categorical = true;
    m.levels = {"married", "single"};
    FeatureSchema a;
    a.name = "age-raw";
    coded.schema = {g, m, a};
    coded.target_schema.name = "y";
    Example ex;
    ex.features = {1.0, std::string("married"), 27.0};
    ex.target = 0.0;
    coded.rows.push_back(ex);

    NumerizeInfo info;
    FeatureSchema gender;
    gender.name = "Gender";
    gender.categorical = true;
    gender.levels = {"Male", "Female"};
    FeatureSchema marriage;
    marriage.name = "Marriage status";
    marriage.categorical = true;
    marriage.levels = {"married", "single"};
    FeatureSchema age;
    age.name = "Age";
    info.original_schema = {gender, marriage, age};
    info.original_target.name = "y";
    info.norm.ranges.resize(3); // age passes through untouched

    TabularDataset verbal = verbalize(coded, info);
    CHECK(render_cell(verbal.schema[0], verbal.rows[0].features[0]) == "Gender=Female");
    CHECK(render_cell(verbal.schema[1], verbal.rows[0].features[1]) == "Marriage status=married");
    CHECK(render_cell(verbal.schema[2], verbal.rows[0].features[2]) == "Age=27");
}

TEST_CASE("verbalize after numerize recovers the original values") {
    TabularDataset ds = paper_example_dataset();
    NumerizedDataset nd = numerize(ds);
    TabularDataset back = verbalize(nd.data, nd.info);

    for (size_t r = 0; r < ds.rows.size(); ++r) {
        CHECK(as_text(back.rows[r].features[0]) == as_text(ds.rows[r].features[0]));
        CHECK(as_number(back.rows[r].features[1]) ==
              doctest::Approx(as_number(ds.rows[r].features[1])));
        CHECK(as_text(back.rows[r].target) == as_text(ds.rows[r].target));
    }
    // numeric 0.33 with stored range [0,100] renders as Age=33
    CHECK(render_cell(back.schema[1], back.rows[1].features[1]) == "age=33 years");
}

TEST_CASE("verbalize rejects undecodable codes") {
    TabularDataset ds = paper_example_dataset();
    NumerizedDataset nd = numerize(ds);
    TabularDataset corrupted = nd.data;
    corrupted.rows[0].features[0] = 0.4321; // not near any of the 16 level codes
    CHECK_THROWS_AS(verbalize(corrupted, nd.info), InvalidData);
}

TEST_CASE("contextualize fills the hint template") {
    ContextBlock ctx;
    ctx.domain_name = "finance";
    ctx.task_prose = "Below you are asked to predict whether the individual has a high income.";
    ctx.feature_explanations = {{"degree", "highest educational degree"},
                                {"age", "age of the person"}};
    ctx.source_prose = "Records resemble a census extract.";

    TaskDescription t;
    t.kind = TaskKind::Classification;
    TaskDescription out = contextualize(t, ctx);
    CHECK(out.mode_tag == EvalMode::PosteriorFull);
    REQUIRE(out.hint.has_value());
    CHECK(out.hint->find("actively make use of any domain knowledge") != std::string::npos);
    CHECK(out.hint->find("finance") != std::string::npos);
    CHECK(out.hint->find("[keywords]") == std::string::npos);
    CHECK(out.text.find("highest educational degree") != std::string::npos);
    CHECK(out.text.find("age of the person") != std::string::npos);
    CHECK(out.text.find("census extract") != std::string::npos);

    ContextBlock empty;
    CHECK_THROWS_AS(contextualize(t, empty), InvalidContext);
}

TEST_CASE("default adult recipe applies the documented edits") {
    TabularDataset ds = make_adultlike(400, 7);
    PerturbationRecipe recipe = default_adult_recipe();
    TabularDataset p = perturb_adult(ds, recipe, 11);

    CHECK(p.n_rows() == ds.n_rows());
    CHECK(p.feature_index("degree").has_value());
    CHECK(!p.feature_index("education").has_value());
    CHECK(p.feature_index("hours per day").has_value());
    CHECK(p.feature_index("capital net gain").has_value());
    CHECK(p.n_features() == 12); // the merge consumed one column

    // renamed schema shares nothing with the renamed originals
    std::set<std::string> original;
    for (const auto& fs : ds.schema) original.insert(fs.name);
    for (const auto& [from, to] : recipe.renames) {
        CHECK(!original.count(to));
    }

    // label marginal preserved exactly
    size_t before = 0, after = 0;
    for (const auto& r : ds.rows) before += as_text(r.target) == "high income";
    for (const auto& r : p.rows) after += as_text(r.target) == "high income";
    CHECK(before == after);

    // capital net gain = gain - loss
    size_t gi = *ds.feature_index("capital-gain");
    size_t li = *ds.feature_index("capital-loss");
    size_t ni = *p.feature_index("capital net gain");
    for (size_t r = 0; r < ds.rows.size(); ++r) {
        double expect = as_number(ds.rows[r].features[gi]) - as_number(ds.rows[r].features[li]);
        CHECK(as_number(p.rows[r].features[ni]) == doctest::Approx(expect));
    }

    // hours per day = hours per week / 7
    size_t hw = *ds.feature_index("hours-per-week");
    size_t hd = *p.feature_index("hours per day");
    for (size_t r = 0; r < ds.rows.size(); ++r)
        CHECK(as_number(p.rows[r].features[hd]) ==
              doctest::Approx(as_number(ds.rows[r].features[hw]) / 7.0));

    // marital status binarized
    size_t mi = *p.feature_index("marital status");
    CHECK(p.schema[mi].levels == std::vector<std::string>{"not-married", "married"});

    // determinism
    TabularDataset p2 = perturb_adult(ds, recipe, 11);
    CHECK(tabular_to_csv(p) == tabular_to_csv(p2));
    TabularDataset p3 = perturb_adult(ds, recipe, 12);
    CHECK(tabular_to_csv(p) != tabular_to_csv(p3));
}

TEST_CASE("age noise is uniform on [-2,2] and clamped") {
    TabularDataset ds = make_adultlike(10000, 21);
    PerturbationRecipe recipe;
    NoiseSpec age;
    age.dist = NoiseSpec::Dist::UniformInt;
    age.a = -2;
    age.b = 2;
    age.clamp_lo = 17;
    age.clamp_hi = 90;
    recipe.noise_specs["age"] = age;

    TabularDataset p = perturb_adult(ds, recipe, 5);
    size_t ai = *ds.feature_index("age");
    std::map<int, size_t> histogram;
    for (size_t r = 0; r < ds.rows.size(); ++r) {
        double before = as_number(ds.rows[r].features[ai]);
        double after = as_number(p.rows[r].features[ai]);
        CHECK(after >= 17.0);
        CHECK(after <= 90.0);
        if (before >= 20 && before <= 85) { // away from the clamp
            int d = int(after - before);
            CHECK(d >= -2);
            CHECK(d <= 2);
            ++histogram[d];
        }
    }
    // roughly uniform: every bucket within 10% of the mean count
    double mean = 0;
    for (auto& [d, c] : histogram) mean += double(c);
    mean /= 5.0;
    for (auto& [d, c] : histogram) CHECK(std::abs(double(c) - mean) < 0.1 * mean);
}

TEST_CASE("perturb_adult rejects non-census schemas") {
    TabularDataset tiny;
    FeatureSchema f;
    f.name = "x";
    tiny.schema = {f};
    tiny.target_schema.name = "y";
    Example ex;
    ex.features = {1.0};
    ex.target = 2.0;
    tiny.rows.push_back(ex);
    CHECK_THROWS_AS(perturb_adult(tiny, default_adult_recipe(), 1), InvalidData);
}

TEST_CASE("rename collisions are rejected") {
    TabularDataset ds = make_adultlike(20, 3);
    PerturbationRecipe recipe;
    recipe.renames = {{"education", "age"}}; // collides with an original name
    CHECK_THROWS_AS(perturb_adult(ds, recipe, 1), InvalidData);
}

TEST_CASE("series perturbation matches the documented law") {
    SeriesDataset s;
    for (int i = 0; i < 10000; ++i) s.points.push_back({double(i), 330.0});

    PerturbationRecipe recipe = default_series_recipe();
    SeriesDataset p = perturb_series(s, recipe, 17);

    // x untouched, deterministic
    SeriesDataset p2 = perturb_series(s, recipe, 17);
    double mean = 0, var = 0;
    for (size_t i = 0; i < p.points.size(); ++i) {
        CHECK(p.points[i].x == s.points[i].x);
        CHECK(p.points[i].y == p2.points[i].y);
        mean += p.points[i].y - s.points[i].y;
    }
    mean /= double(p.points.size());
    for (size_t i = 0; i < p.points.size(); ++i) {
        double d = p.points[i].y - s.points[i].y - mean;
        var += d * d;
    }
    var /= double(p.points.size());
    // noise mean 1 plus shift 1; sd 0.1
    CHECK(mean == doctest::Approx(2.0).epsilon(0.01));
    CHECK(std::sqrt(var) == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("shift only moves y by one unit") {
    SeriesDataset s;
    s.points = {{0.0, 330.0}, {1.0, 331.5}};
    PerturbationRecipe recipe;
    recipe.shift = 1.0;
    SeriesDataset p = perturb_series(s, recipe, 3);
    CHECK(p.points[0].y == doctest::Approx(331.0));
    CHECK(p.points[1].y == doctest::Approx(332.5));
    CHECK(p.points[0].x == 0.0);
}

TEST_CASE("hide_metadata strips the source prose") {
    SeriesDataset s = make_co2like(1958.25, 1960.0, 1);
    REQUIRE(s.context.has_value());
    REQUIRE(!s.context->source_prose.empty());
    PerturbationRecipe recipe;
    recipe.hide_metadata = true;
    SeriesDataset p = perturb_series(s, recipe, 1);
    CHECK(p.context->source_prose.empty());
}

TEST_CASE("multiplicative noise flag is honored") {
    SeriesDataset s;
    for (int i = 0; i < 4000; ++i) s.points.push_back({double(i), 100.0});
    PerturbationRecipe recipe;
    NoiseSpec noise;
    noise.dist = NoiseSpec::Dist::Gaussian;
    noise.a = 1.0;
    noise.b = 0.01;
    noise.multiplicative = true;
    recipe.noise_specs["y"] = noise;
    SeriesDataset p = perturb_series(s, recipe, 9);
    double mean = 0;
    for (size_t i = 0; i < p.points.size(); ++i) mean += p.points[i].y;
    mean /= double(p.points.size());
    CHECK(mean == doctest::Approx(100.0).epsilon(0.001));
}

TEST_CASE("recipes round-trip through JSON and hash stably") {
    PerturbationRecipe r = default_adult_recipe();
    std::string text = recipe_to_json(r);
    PerturbationRecipe back = recipe_from_json(text);
    CHECK(recipe_to_json(back) == text);
    CHECK(recipe_hash(back) == recipe_hash(r));
    PerturbationRecipe other = default_series_recipe();
    CHECK(recipe_hash(other) != recipe_hash(r));
}

TEST_CASE("blocklist matches whole words case-insensitively") {
    Blocklist bl;
    bl.add("age");
    bl.add("hours per week");
    CHECK(bl.clean("a message about nothing"));
    CHECK(!bl.clean("the AGE of the person"));
    CHECK(!bl.clean("works many Hours Per Week indeed"));
    CHECK(bl.clean("encourage more usage"));
}
