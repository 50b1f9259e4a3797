#include <doctest.h>

#include <cmath>
#include <set>

#include "funcmod/corpus.hpp"
#include "funcmod/evaluation.hpp"
#include "funcmod/transforms.hpp"

using namespace funcmod;

TEST_CASE("the census corpus has the classic 13-feature schema") {
    TabularDataset ds = make_adultlike(500, 7);
    CHECK(ds.n_features() == 13);
    CHECK(ds.n_rows() == 500);
    CHECK_NOTHROW(ds.validate());

    const char* expected[] = {"age",          "workclass",  "fnlwgt",        "education",
                              "marital-status", "occupation", "relationship", "race",
                              "sex",          "capital-gain", "capital-loss", "hours-per-week",
                              "native-country"};
    for (size_t i = 0; i < 13; ++i) CHECK(ds.schema[i].name == expected[i]);
    CHECK(ds.schema[3].levels.size() == 16);
    CHECK(ds.target_schema.levels == std::vector<std::string>{"low income", "high income"});
    REQUIRE(ds.context.has_value());
    CHECK(!ds.context->domain_name.empty());
    CHECK(ds.context->feature_explanations.size() == 13);
}

TEST_CASE("corpus generation is reproducible and seed-sensitive") {
    TabularDataset a = make_adultlike(200, 7);
    TabularDataset b = make_adultlike(200, 7);
    TabularDataset c = make_adultlike(200, 8);
    CHECK(tabular_to_csv(a) == tabular_to_csv(b));
    CHECK(tabular_to_csv(a) != tabular_to_csv(c));

    // a prefix of a larger corpus matches the smaller one row for row
    TabularDataset big = make_adultlike(400, 7);
    big.rows.resize(200);
    CHECK(tabular_to_csv(big) == tabular_to_csv(a));
}

TEST_CASE("the income rate sits in the census ballpark") {
    TabularDataset ds = make_adultlike(20000, 3);
    size_t high = 0;
    for (const auto& r : ds.rows) high += as_text(r.target) == "high income";
    double rate = double(high) / double(ds.n_rows());
    CHECK(rate > 0.18);
    CHECK(rate < 0.33);
}

TEST_CASE("ages and hours stay in plausible ranges") {
    TabularDataset ds = make_adultlike(3000, 11);
    size_t ai = *ds.feature_index("age");
    size_t hi = *ds.feature_index("hours-per-week");
    size_t gi = *ds.feature_index("capital-gain");
    for (const auto& r : ds.rows) {
        double age = as_number(r.features[ai]);
        CHECK(age >= 17.0);
        CHECK(age <= 90.0);
        CHECK(age == std::round(age));
        double hours = as_number(r.features[hi]);
        CHECK(hours >= 1.0);
        CHECK(hours <= 99.0);
        CHECK(as_number(r.features[gi]) >= 0.0);
    }
}

TEST_CASE("education carries predictive signal") {
    TabularDataset ds = make_adultlike(20000, 5);
    size_t ei = *ds.feature_index("education");
    size_t lo_hi = 0, lo_n = 0, hi_hi = 0, hi_n = 0;
    for (const auto& r : ds.rows) {
        size_t idx = *ds.schema[ei].level_index(as_text(r.features[ei]));
        bool high = as_text(r.target) == "high income";
        if (idx <= 8) {
            ++lo_n;
            lo_hi += high;
        } else if (idx >= 12) {
            ++hi_n;
            hi_hi += high;
        }
    }
    double low_rate = double(lo_hi) / double(lo_n);
    double high_rate = double(hi_hi) / double(hi_n);
    CHECK(high_rate > low_rate + 0.2);
}

TEST_CASE("the co2 corpus is monthly with trend and seasonality") {
    SeriesDataset s = make_co2like(1958.25, 2001.0, 5);
    CHECK_NOTHROW(s.validate());
    CHECK(s.points.size() == 514);
    CHECK(s.points[1].x - s.points[0].x == doctest::Approx(1.0 / 12.0));

    // rising decade averages
    auto mean_between = [&](double lo, double hi) {
        double sum = 0;
        size_t n = 0;
        for (const auto& p : s.points)
            if (p.x >= lo && p.x < hi) {
                sum += p.y;
                ++n;
            }
        return sum / double(n);
    };
    double d60 = mean_between(1960, 1970);
    double d80 = mean_between(1980, 1990);
    double d90 = mean_between(1990, 2000);
    CHECK(d80 > d60 + 10.0);
    CHECK(d90 > d80 + 10.0);
    // accelerating growth per year (the windows span different gaps)
    CHECK((d90 - d80) / 10.0 > (d80 - d60) / 20.0);

    double period = dominant_period(s.points, 0.3, 3.0);
    CHECK(period * 12.0 > 11.0);
    CHECK(period * 12.0 < 13.0);

    REQUIRE(s.context.has_value());
    CHECK(s.context->source_prose.find("Mauna Loa") != std::string::npos);
}

TEST_CASE("the co2 corpus is reproducible") {
    SeriesDataset a = make_co2like(1958.25, 1990.0, 5);
    SeriesDataset b = make_co2like(1958.25, 1990.0, 5);
    SeriesDataset c = make_co2like(1958.25, 1990.0, 6);
    CHECK(series_to_csv(a) == series_to_csv(b));
    CHECK(series_to_csv(a) != series_to_csv(c));
}
