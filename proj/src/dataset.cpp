#include "funcmod/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "funcmod/csv.hpp"
#include "funcmod/errors.hpp"
#include "funcmod/rng.hpp"

namespace funcmod {

using nlohmann::json;

std::string to_string(EvalMode mode) {
    return mode == EvalMode::LikelihoodOnly ? "likelihood_only" : "posterior_full";
}

std::optional<size_t> FeatureSchema::level_index(const std::string& level) const {
    for (size_t i = 0; i < levels.size(); ++i)
        if (levels[i] == level) return i;
    return std::nullopt;
}

void FeatureSchema::validate() const {
    if (name.empty()) throw InvalidData("feature with empty name");
    if (categorical) {
        if (levels.empty()) throw InvalidData("categorical feature '" + name + "' has no levels");
        std::set<std::string> seen(levels.begin(), levels.end());
        if (seen.size() != levels.size())
            throw InvalidData("categorical feature '" + name + "' has duplicate levels");
    } else if (!levels.empty()) {
        throw InvalidData("numeric feature '" + name + "' carries levels");
    }
}

bool is_numeric(const FeatureValue& v) { return std::holds_alternative<double>(v); }

double as_number(const FeatureValue& v) {
    if (!is_numeric(v)) throw InvalidData("expected numeric value, got '" + std::get<std::string>(v) + "'");
    return std::get<double>(v);
}

const std::string& as_text(const FeatureValue& v) {
    if (is_numeric(v)) throw InvalidData("expected categorical value, got a number");
    return std::get<std::string>(v);
}

std::optional<size_t> TabularDataset::feature_index(const std::string& name) const {
    for (size_t i = 0; i < schema.size(); ++i)
        if (schema[i].name == name) return i;
    return std::nullopt;
}

namespace {

void check_value(const FeatureSchema& fs, const FeatureValue& v, size_t row) {
    if (fs.categorical) {
        if (is_numeric(v))
            throw InvalidData("row " + std::to_string(row) + ": numeric value in categorical '" + fs.name + "'");
        if (!fs.level_index(as_text(v)))
            throw InvalidData("row " + std::to_string(row) + ": unknown level '" + as_text(v) +
                              "' for '" + fs.name + "'");
    } else {
        if (!is_numeric(v))
            throw InvalidData("row " + std::to_string(row) + ": text value in numeric '" + fs.name + "'");
        if (!std::isfinite(as_number(v)))
            throw InvalidData("row " + std::to_string(row) + ": non-finite value in '" + fs.name + "'");
    }
}

} // namespace

void TabularDataset::validate() const {
    std::set<std::string> names;
    for (const auto& fs : schema) {
        fs.validate();
        if (!names.insert(fs.name).second)
            throw InvalidData("duplicate feature name '" + fs.name + "'");
    }
    target_schema.validate();
    if (names.count(target_schema.name))
        throw InvalidData("target name collides with feature '" + target_schema.name + "'");
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].features.size() != schema.size())
            throw InvalidData("row " + std::to_string(r) + ": arity mismatch");
        for (size_t c = 0; c < schema.size(); ++c) check_value(schema[c], rows[r].features[c], r);
        check_value(target_schema, rows[r].target, r);
    }
}

void SeriesDataset::validate() const {
    for (size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y))
            throw InvalidData("series point " + std::to_string(i) + " not finite");
        if (i > 0 && points[i].x <= points[i - 1].x)
            throw InvalidData("series x values must be strictly increasing");
    }
}

std::pair<TabularDataset, NormParams> normalize_minmax(const TabularDataset& dataset) {
    NormParams params;
    params.ranges.resize(dataset.schema.size());
    for (size_t c = 0; c < dataset.schema.size(); ++c) {
        if (dataset.schema[c].categorical) continue;
        FeatureRange r;
        r.used = true;
        r.integral = true;
        r.min = std::numeric_limits<double>::infinity();
        r.max = -std::numeric_limits<double>::infinity();
        for (const auto& row : dataset.rows) {
            double v = as_number(row.features[c]);
            if (!std::isfinite(v))
                throw InvalidData("non-finite value in feature '" + dataset.schema[c].name + "'");
            r.min = std::min(r.min, v);
            r.max = std::max(r.max, v);
            if (v != std::round(v)) r.integral = false;
        }
        if (dataset.rows.empty()) { r.min = 0; r.max = 0; r.integral = false; }
        params.ranges[c] = r;
    }
    return {apply_minmax(dataset, params), params};
}

TabularDataset apply_minmax(const TabularDataset& dataset, const NormParams& params) {
    if (params.ranges.size() != dataset.schema.size())
        throw InvalidData("normalization params do not match schema arity");
    TabularDataset out = dataset;
    for (auto& row : out.rows) {
        for (size_t c = 0; c < out.schema.size(); ++c) {
            const FeatureRange& r = params.ranges[c];
            if (!r.used) continue;
            double v = as_number(row.features[c]);
            if (!std::isfinite(v)) throw InvalidData("non-finite value during normalization");
            row.features[c] = (r.max > r.min) ? (v - r.min) / (r.max - r.min) : 0.5;
        }
    }
    return out;
}

double denormalize(double v01, const FeatureRange& range) {
    if (!range.used) return v01;
    if (range.max <= range.min) return range.min;
    return range.min + v01 * (range.max - range.min);
}

std::pair<std::vector<size_t>, std::vector<size_t>> split_indices(const TabularDataset& dataset,
                                                                  size_t train_n, uint64_t seed) {
    size_t n = dataset.n_rows();
    if (train_n >= n)
        throw InvalidSplit("train_n=" + std::to_string(train_n) + " >= rows=" + std::to_string(n));

    std::vector<size_t> train_ids;
    if (dataset.task_kind() == TaskKind::Classification) {
        // Group rows by label, shuffle each group on its own stream, then take
        // proportional counts (largest remainder) so the label marginal holds.
        std::map<std::string, std::vector<size_t>> groups;
        for (size_t i = 0; i < n; ++i) groups[as_text(dataset.rows[i].target)].push_back(i);

        std::vector<std::pair<std::string, std::vector<size_t>>> ordered(groups.begin(), groups.end());
        Rng rng = Rng(seed).split("split");
        std::vector<size_t> takes;
        std::vector<double> remainders;
        size_t assigned = 0;
        for (auto& [label, ids] : ordered) {
            double exact = static_cast<double>(train_n) * ids.size() / n;
            size_t take = static_cast<size_t>(exact);
            takes.push_back(take);
            remainders.push_back(exact - static_cast<double>(take));
            assigned += take;
        }
        while (assigned < train_n) {
            size_t best = 0;
            for (size_t g = 1; g < ordered.size(); ++g)
                if (remainders[g] > remainders[best]) best = g;
            if (takes[best] < ordered[best].second.size()) ++takes[best], ++assigned;
            remainders[best] = -1;
        }
        for (size_t g = 0; g < ordered.size(); ++g) {
            RngSequence rs(rng.split(ordered[g].first));
            shuffle(ordered[g].second, rs);
            for (size_t i = 0; i < takes[g]; ++i) train_ids.push_back(ordered[g].second[i]);
        }
    } else {
        std::vector<size_t> ids(n);
        for (size_t i = 0; i < n; ++i) ids[i] = i;
        RngSequence rs(Rng(seed).split("split"));
        shuffle(ids, rs);
        train_ids.assign(ids.begin(), ids.begin() + static_cast<long>(train_n));
    }

    std::vector<bool> in_train(n, false);
    for (size_t i : train_ids) in_train[i] = true;
    std::vector<size_t> train_sorted, test_sorted;
    for (size_t i = 0; i < n; ++i) (in_train[i] ? train_sorted : test_sorted).push_back(i);
    return {train_sorted, test_sorted};
}

std::pair<TabularDataset, TabularDataset> split(const TabularDataset& dataset,
                                                size_t train_n, uint64_t seed) {
    auto [train_ids, test_ids] = split_indices(dataset, train_n, seed);
    TabularDataset train, test;
    train.schema = test.schema = dataset.schema;
    train.target_schema = test.target_schema = dataset.target_schema;
    train.context = test.context = dataset.context;
    for (size_t i : train_ids) train.rows.push_back(dataset.rows[i]);
    for (size_t i : test_ids) test.rows.push_back(dataset.rows[i]);
    return {train, test};
}

namespace {

std::string value_to_string(const FeatureValue& v) {
    return is_numeric(v) ? format_double(as_number(v)) : as_text(v);
}

FeatureValue value_from_string(const FeatureSchema& fs, const std::string& s) {
    if (fs.categorical) return s;
    return parse_double(s);
}

json schema_entry_to_json(const FeatureSchema& fs) {
    json j;
    j["name"] = fs.name;
    j["kind"] = fs.categorical ? "categorical" : "numeric";
    if (fs.categorical) j["levels"] = fs.levels;
    if (!fs.unit.empty()) j["unit"] = fs.unit;
    if (!fs.description.empty()) j["description"] = fs.description;
    return j;
}

FeatureSchema schema_entry_from_json(const json& j) {
    FeatureSchema fs;
    fs.name = j.at("name").get<std::string>();
    fs.categorical = j.at("kind").get<std::string>() == "categorical";
    if (fs.categorical) fs.levels = j.at("levels").get<std::vector<std::string>>();
    if (j.contains("unit")) fs.unit = j["unit"].get<std::string>();
    if (j.contains("description")) fs.description = j["description"].get<std::string>();
    return fs;
}

json context_to_json(const ContextBlock& ctx) {
    json j;
    j["domain_name"] = ctx.domain_name;
    j["task_prose"] = ctx.task_prose;
    j["feature_explanations"] = ctx.feature_explanations;
    if (!ctx.source_prose.empty()) j["source_prose"] = ctx.source_prose;
    return j;
}

ContextBlock context_from_json(const json& j) {
    ContextBlock ctx;
    ctx.domain_name = j.value("domain_name", "");
    ctx.task_prose = j.value("task_prose", "");
    if (j.contains("feature_explanations"))
        ctx.feature_explanations = j["feature_explanations"].get<std::map<std::string, std::string>>();
    ctx.source_prose = j.value("source_prose", "");
    return ctx;
}

} // namespace

std::string tabular_to_csv(const TabularDataset& dataset) {
    std::string out;
    for (const auto& fs : dataset.schema) out += csv_escape(fs.name) + ",";
    out += csv_escape(dataset.target_schema.name) + "\n";
    for (const auto& row : dataset.rows) {
        for (const auto& v : row.features) out += csv_escape(value_to_string(v)) + ",";
        out += csv_escape(value_to_string(row.target)) + "\n";
    }
    return out;
}

std::string schema_to_json(const TabularDataset& dataset) {
    json j;
    j["features"] = json::array();
    for (const auto& fs : dataset.schema) j["features"].push_back(schema_entry_to_json(fs));
    j["target"] = schema_entry_to_json(dataset.target_schema);
    if (dataset.context) j["context"] = context_to_json(*dataset.context);
    return j.dump(2) + "\n";
}

void save_tabular(const TabularDataset& dataset, const std::string& csv_path,
                  const std::string& schema_path) {
    write_file_atomic(csv_path, tabular_to_csv(dataset));
    write_file_atomic(schema_path, schema_to_json(dataset));
}

TabularDataset load_tabular(const std::string& csv_path, const std::string& schema_path) {
    TabularDataset ds;
    json j;
    try {
        j = json::parse(read_file(schema_path));
    } catch (const json::exception& e) {
        throw InvalidData("bad schema file " + schema_path + ": " + e.what());
    }
    for (const auto& entry : j.at("features")) ds.schema.push_back(schema_entry_from_json(entry));
    ds.target_schema = schema_entry_from_json(j.at("target"));
    if (j.contains("context")) ds.context = context_from_json(j["context"]);

    auto rows = parse_csv(read_file(csv_path));
    if (rows.empty()) throw InvalidData("empty CSV " + csv_path);
    if (rows[0].size() != ds.schema.size() + 1)
        throw InvalidData("CSV header arity does not match schema");
    for (size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != ds.schema.size() + 1)
            throw InvalidData("CSV row " + std::to_string(r) + " arity mismatch");
        Example ex;
        for (size_t c = 0; c < ds.schema.size(); ++c)
            ex.features.push_back(value_from_string(ds.schema[c], rows[r][c]));
        ex.target = value_from_string(ds.target_schema, rows[r].back());
        ds.rows.push_back(std::move(ex));
    }
    ds.validate();
    return ds;
}

std::string series_to_csv(const SeriesDataset& series) {
    std::string out = "x,y\n";
    for (const auto& p : series.points)
        out += format_double(p.x) + "," + format_double(p.y) + "\n";
    return out;
}

void save_series(const SeriesDataset& series, const std::string& csv_path,
                 const std::string& meta_path) {
    write_file_atomic(csv_path, series_to_csv(series));
    if (!meta_path.empty()) {
        json j;
        j["x_unit"] = series.x_unit;
        j["y_unit"] = series.y_unit;
        if (series.context) j["context"] = context_to_json(*series.context);
        write_file_atomic(meta_path, j.dump(2) + "\n");
    }
}

SeriesDataset load_series(const std::string& csv_path, const std::string& meta_path) {
    SeriesDataset s;
    auto rows = parse_csv(read_file(csv_path));
    for (size_t r = 0; r < rows.size(); ++r) {
        if (r == 0 && rows[r].size() == 2 && rows[r][0] == "x" && rows[r][1] == "y") continue;
        if (rows[r].size() != 2) throw InvalidData("series CSV must have two columns");
        s.points.push_back({parse_double(rows[r][0]), parse_double(rows[r][1])});
    }
    if (!meta_path.empty()) {
        json j = json::parse(read_file(meta_path));
        s.x_unit = j.value("x_unit", "");
        s.y_unit = j.value("y_unit", "");
        if (j.contains("context")) s.context = context_from_json(j["context"]);
    }
    s.validate();
    return s;
}

TabularDataset series_to_tabular(const SeriesDataset& series) {
    TabularDataset ds;
    FeatureSchema x;
    x.name = series.x_unit.empty() ? "x" : series.x_unit;
    ds.schema.push_back(x);
    ds.target_schema.name = series.y_unit.empty() ? "y" : series.y_unit;
    ds.context = series.context;
    for (const auto& p : series.points) {
        Example ex;
        ex.features.push_back(p.x);
        ex.target = p.y;
        ds.rows.push_back(ex);
    }
    return ds;
}

} // namespace funcmod
