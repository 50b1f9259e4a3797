#include "funcmod/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "funcmod/rng.hpp"

namespace funcmod {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

const std::vector<std::string> kWorkclass = {
    "Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov",
    "Local-gov", "State-gov", "Without-pay", "Never-worked"};
const std::vector<std::string> kEducation = {
    "Preschool", "1st-4th", "5th-6th", "7th-8th", "9th", "10th", "11th", "12th",
    "HS-grad", "Some-college", "Assoc-voc", "Assoc-acdm", "Bachelors", "Masters",
    "Prof-school", "Doctorate"};
const std::vector<std::string> kMarital = {
    "Never-married", "Married-civ-spouse", "Divorced", "Married-spouse-absent",
    "Separated", "Married-AF-spouse", "Widowed"};
const std::vector<std::string> kOccupation = {
    "Tech-support", "Craft-repair", "Other-service", "Sales", "Exec-managerial",
    "Prof-specialty", "Handlers-cleaners", "Machine-op-inspct", "Adm-clerical",
    "Farming-fishing", "Transport-moving", "Priv-house-serv", "Protective-serv",
    "Armed-Forces"};
const std::vector<std::string> kRelationship = {
    "Wife", "Own-child", "Husband", "Not-in-family", "Other-relative", "Unmarried"};
const std::vector<std::string> kRace = {
    "White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other", "Black"};
const std::vector<std::string> kSex = {"Male", "Female"};
const std::vector<std::string> kCountry = {
    "United-States", "Mexico", "Philippines", "Germany", "Canada", "India",
    "England", "Cuba", "China", "Other"};

// skill score per occupation level, aligned with kOccupation
const double kOccScore[] = {0.55, 0.35, 0.10, 0.45, 0.95, 0.90, 0.05,
                            0.25, 0.30, 0.10, 0.30, 0.00, 0.50, 0.40};

FeatureSchema numeric_feature(const std::string& name, const std::string& unit,
                              const std::string& description) {
    FeatureSchema fs;
    fs.name = name;
    fs.unit = unit;
    fs.description = description;
    return fs;
}

FeatureSchema categorical_feature(const std::string& name, std::vector<std::string> levels,
                                  const std::string& description) {
    FeatureSchema fs;
    fs.name = name;
    fs.categorical = true;
    fs.levels = std::move(levels);
    fs.description = description;
    return fs;
}

// Up to 8 independent draws per row from one stream.
struct RowDraws {
    Rng rng;
    uint64_t base;
    double uniform(uint64_t slot) const { return rng.uniform(base + slot); }
    double normal(uint64_t slot) const { return rng.normal(base + slot); }
    int64_t uniform_int(uint64_t slot, int64_t lo, int64_t hi) const {
        return rng.uniform_int(base + slot, lo, hi);
    }
};

RowDraws draws(const Rng& stream, size_t row) { return {stream, static_cast<uint64_t>(row) * 8}; }

} // namespace

TabularDataset make_adultlike(size_t n, uint64_t seed) {
    TabularDataset ds;
    ds.schema = {
        numeric_feature("age", "years", "age of the individual"),
        categorical_feature("workclass", kWorkclass, "kind of employer"),
        numeric_feature("fnlwgt", "", "sampling weight assigned by the survey"),
        categorical_feature("education", kEducation, "highest educational attainment"),
        categorical_feature("marital-status", kMarital, "current marital situation"),
        categorical_feature("occupation", kOccupation, "kind of work performed"),
        categorical_feature("relationship", kRelationship, "role within the household"),
        categorical_feature("race", kRace, "self-reported race"),
        categorical_feature("sex", kSex, "self-reported sex"),
        numeric_feature("capital-gain", "dollars", "investment gains for the year"),
        numeric_feature("capital-loss", "dollars", "investment losses for the year"),
        numeric_feature("hours-per-week", "hours", "usual weekly working hours"),
        categorical_feature("native-country", kCountry, "country of origin"),
    };
    ds.target_schema = categorical_feature("income", {"low income", "high income"},
                                           "whether yearly income is high");

    ContextBlock ctx;
    ctx.domain_name = "household income prediction in the United States";
    ctx.task_prose =
        "Below you are asked to predict whether the individual has a high income given some "
        "features that describe the individual's info. An intuitive guess rather than an "
        "accurate estimate is enough.";
    for (const auto& fs : ds.schema) ctx.feature_explanations[fs.name] = fs.description;
    ctx.source_prose = "The records mimic a United States census income survey.";
    ds.context = ctx;

    Rng root(seed);
    Rng s_latent = root.split("latent");
    Rng s_age = root.split("age");
    Rng s_work = root.split("workclass");
    Rng s_fnlwgt = root.split("fnlwgt");
    Rng s_edu = root.split("education");
    Rng s_marital = root.split("marital");
    Rng s_occ = root.split("occupation");
    Rng s_rel = root.split("relationship");
    Rng s_race = root.split("race");
    Rng s_sex = root.split("sex");
    Rng s_gain = root.split("capital-gain");
    Rng s_loss = root.split("capital-loss");
    Rng s_hours = root.split("hours");
    Rng s_country = root.split("country");
    Rng s_label = root.split("label");

    ds.rows.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        double s = draws(s_latent, i).normal(0); // socioeconomic propensity

        double age = std::clamp(std::round(38.0 + 12.5 * draws(s_age, i).normal(0)), 17.0, 90.0);
        double age01 = (age - 17.0) / 73.0;
        // earnings peak in the early fifties
        double age_peak = std::exp(-0.5 * std::pow((age - 52.0) / 14.0, 2.0));

        size_t edu_idx = static_cast<size_t>(
            std::clamp(std::round(8.6 + 2.6 * s + 1.7 * draws(s_edu, i).normal(0)), 0.0, 15.0));
        double edu01 = static_cast<double>(edu_idx) / 15.0;

        // marriage odds grow with age
        auto md = draws(s_marital, i);
        bool married = md.uniform(0) < sigmoid(-0.9 + 2.0 * age01 + 0.45 * s);
        size_t marital_idx;
        if (married) {
            double u = md.uniform(1);
            marital_idx = u < 0.94 ? 1 : (u < 0.97 ? 3 : 5);
        } else {
            double u = md.uniform(2);
            marital_idx = u < 0.55 ? 0 : (u < 0.80 ? 2 : (u < 0.90 ? 4 : 6));
        }

        // skilled occupations track education
        auto od = draws(s_occ, i);
        size_t occ_idx = static_cast<size_t>(od.uniform_int(0, 0, 13));
        for (uint64_t redraw = 0; redraw < 2; ++redraw) {
            if (kOccScore[occ_idx] < 0.45 && od.uniform(1 + redraw) < 0.62 * edu01)
                occ_idx = static_cast<size_t>(od.uniform_int(3 + redraw, 0, 13));
        }
        double occ01 = kOccScore[occ_idx];

        bool male = draws(s_sex, i).uniform(0) < (married ? 0.67 : 0.52);

        size_t rel_idx;
        if (married) {
            rel_idx = male ? 2 : 0; // Husband / Wife
        } else {
            double u = draws(s_rel, i).uniform(0);
            rel_idx = u < 0.35 ? 3 : (u < 0.65 ? 1 : (u < 0.90 ? 5 : 4));
        }

        auto rd = draws(s_race, i);
        size_t race_idx = rd.uniform(0) < 0.85
                              ? (rd.uniform(1) < 0.86 ? 0 : 4)
                              : static_cast<size_t>(rd.uniform_int(2, 1, 3));
        auto cd = draws(s_country, i);
        size_t country_idx =
            cd.uniform(0) < 0.89 ? 0 : static_cast<size_t>(cd.uniform_int(1, 1, 9));

        auto hd = draws(s_hours, i);
        double hours = std::clamp(std::round((married ? 40.0 : 38.0) + 3.5 * s + 3.0 * occ01 +
                                             8.5 * hd.normal(0)),
                                  1.0, 99.0);
        double hours01 = (hours - 1.0) / 98.0;

        auto gd = draws(s_gain, i);
        double gain = 0.0;
        if (gd.uniform(0) < sigmoid((married ? -3.1 : -3.6) + 1.1 * s))
            gain = std::min(99999.0, std::round(std::exp(8.5 + 0.8 * gd.normal(1))));
        auto ld = draws(s_loss, i);
        double loss = 0.0;
        if (ld.uniform(0) < (married ? 0.045 : 0.035))
            loss = std::clamp(std::round(1850.0 + 320.0 * ld.normal(1)), 100.0, 4356.0);

        auto wd = draws(s_work, i);
        size_t work_idx = wd.uniform(0) < 0.71 ? 0 : static_cast<size_t>(wd.uniform_int(1, 1, 7));
        double fnlwgt = std::round(std::exp(12.0 + 0.42 * draws(s_fnlwgt, i).normal(0)));

        double z = -5.35 + 2.9 * edu01 + (married ? 1.8 : 0.0) + 1.35 * occ01 + 0.9 * hours01 +
                   0.9 * age_peak + (male ? 0.22 : 0.0) + (gain > 3000.0 ? 1.9 : 0.0) +
                   (loss > 1500.0 ? 0.5 : 0.0);
        bool high = draws(s_label, i).uniform(0) < sigmoid(1.45 * z);

        Example ex;
        ex.features = {age,
                       kWorkclass[work_idx],
                       fnlwgt,
                       kEducation[edu_idx],
                       kMarital[marital_idx],
                       kOccupation[occ_idx],
                       kRelationship[rel_idx],
                       kRace[race_idx],
                       kSex[male ? 0 : 1],
                       gain,
                       loss,
                       hours,
                       kCountry[country_idx]};
        ex.target = ds.target_schema.levels[high ? 1 : 0];
        ds.rows.push_back(std::move(ex));
    }
    return ds;
}

SeriesDataset make_co2like(double start_year, double end_year, uint64_t seed) {
    SeriesDataset s;
    s.x_unit = "year";
    s.y_unit = "co2 ppm";

    ContextBlock ctx;
    ctx.domain_name = "atmospheric carbon dioxide concentration";
    ctx.task_prose =
        "Below you are asked to predict the atmospheric CO2 concentration in parts per million "
        "for a given point in time. An intuitive guess rather than an accurate estimate is "
        "enough.";
    ctx.feature_explanations = {{"year", "calendar time expressed as a fractional year"}};
    ctx.source_prose = "Monthly averages recorded at the Mauna Loa Observatory in Hawaii.";
    s.context = ctx;

    Rng noise = Rng(seed).split("co2-noise");
    size_t i = 0;
    for (double t = start_year; t <= end_year + 1e-9; t += 1.0 / 12.0, ++i) {
        double u = t - 1958.0;
        double trend = 314.5 + 0.77 * u + 0.0125 * u * u;
        double amp = 2.55 + 0.012 * u;
        double seasonal = amp * (std::sin(2.0 * M_PI * (t - 0.125)) +
                                 0.30 * std::sin(4.0 * M_PI * (t - 0.06)));
        double y = trend + seasonal + noise.normal(i, 0.0, 0.22);
        s.points.push_back({t, y});
    }
    return s;
}

} // namespace funcmod
