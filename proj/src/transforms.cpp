#include "funcmod/transforms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "funcmod/csv.hpp"
#include "funcmod/errors.hpp"
#include "funcmod/rng.hpp"

namespace funcmod {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Blocklist

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool generic_name(const std::string& w) {
    // single letters and bare indices carry no domain semantics
    if (w.size() <= 1) return true;
    return std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

// Proper nouns from free prose: capitalized words that do not open a sentence.
void add_identity_words(Blocklist& bl, const std::string& prose) {
    bool sentence_start = true;
    size_t i = 0;
    while (i < prose.size()) {
        if (!word_char(prose[i])) {
            if (prose[i] == '.' || prose[i] == '!' || prose[i] == '?') sentence_start = true;
            ++i;
            continue;
        }
        size_t j = i;
        while (j < prose.size() && word_char(prose[j])) ++j;
        std::string word = prose.substr(i, j - i);
        if (!sentence_start && std::isupper(static_cast<unsigned char>(word[0])) && word.size() > 1)
            bl.add(word);
        sentence_start = false;
        i = j;
    }
}

} // namespace

void Blocklist::add(const std::string& word) {
    if (generic_name(word)) return;
    std::string w = lowercase(word);
    if (std::find(words_.begin(), words_.end(), w) == words_.end()) words_.push_back(w);
}

Blocklist Blocklist::for_dataset(const TabularDataset& dataset) {
    Blocklist bl;
    for (const auto& fs : dataset.schema) {
        bl.add(fs.name);
        bl.add(fs.unit);
        for (const auto& level : fs.levels) bl.add(level);
    }
    bl.add(dataset.target_schema.name);
    bl.add(dataset.target_schema.unit);
    for (const auto& level : dataset.target_schema.levels) bl.add(level);
    if (dataset.context) {
        bl.add(dataset.context->domain_name);
        add_identity_words(bl, dataset.context->source_prose);
    }
    return bl;
}

Blocklist Blocklist::for_series(const SeriesDataset& series) {
    Blocklist bl;
    bl.add(series.x_unit);
    bl.add(series.y_unit);
    if (series.context) {
        bl.add(series.context->domain_name);
        for (const auto& [name, _] : series.context->feature_explanations) bl.add(name);
        add_identity_words(bl, series.context->source_prose);
    }
    return bl;
}

std::vector<std::string> Blocklist::hits(const std::string& text) const {
    std::string low = lowercase(text);
    std::vector<std::string> found;
    for (const auto& w : words_) {
        size_t pos = 0;
        while ((pos = low.find(w, pos)) != std::string::npos) {
            bool left_ok = pos == 0 || !word_char(low[pos - 1]);
            size_t end = pos + w.size();
            bool right_ok = end >= low.size() || !word_char(low[end]);
            if (left_ok && right_ok) {
                found.push_back(w);
                break;
            }
            ++pos;
        }
    }
    return found;
}

// ---------------------------------------------------------------------------
// Recipes

void PerturbationRecipe::validate(const std::vector<FeatureSchema>& schema) const {
    std::set<std::string> names;
    for (const auto& fs : schema) names.insert(fs.name);
    auto require = [&](const std::string& name, const char* what) {
        if (!names.count(name))
            throw InvalidData(std::string(what) + " references unknown feature '" + name + "'");
    };
    for (const auto& [old_name, new_name] : renames) {
        require(old_name, "rename");
        if (names.count(new_name))
            throw InvalidData("rename target '" + new_name + "' collides with an original name");
    }
    for (const auto& [name, _] : noise_specs) require(name, "noise spec");
    for (const auto& [name, _] : scale_changes) require(name, "scale change");
    for (const auto& [name, _] : binarizations) require(name, "binarization");
    for (const auto& m : merges) {
        std::set<std::string> distinct(m.inputs.begin(), m.inputs.end());
        if (distinct.size() != m.inputs.size())
            throw InvalidData("merge inputs must be pairwise distinct");
        for (const auto& in : m.inputs) require(in, "merge");
        if (names.count(m.output))
            throw InvalidData("merge output '" + m.output + "' collides with an original name");
    }
}

PerturbationRecipe default_adult_recipe() {
    PerturbationRecipe r;
    r.renames = {
        {"education", "degree"},
        {"sex", "gender"},
        {"race", "ethnicity"},
        {"fnlwgt", "representative weight"},
        {"workclass", "employer type"},
        {"relationship", "household role"},
        {"native-country", "country of origin"},
        {"marital-status", "marital status"},
    };
    NoiseSpec age;
    age.dist = NoiseSpec::Dist::UniformInt;
    age.a = -2;
    age.b = 2;
    age.clamp_lo = 17;
    age.clamp_hi = 90;
    r.noise_specs["age"] = age;
    Binarization marital;
    marital.positive_levels = {"Married-civ-spouse", "Married-AF-spouse", "Married-spouse-absent"};
    marital.positive_name = "married";
    marital.negative_name = "not-married";
    r.binarizations["marital-status"] = marital;
    ScaleChange hours;
    hours.factor = 1.0 / 7.0;
    hours.new_name = "hours per day";
    hours.new_unit = "hours";
    r.scale_changes["hours-per-week"] = hours;
    MergeSpec capital;
    capital.inputs = {"capital-gain", "capital-loss"};
    capital.output = "capital net gain";
    capital.combiner = MergeSpec::Combiner::Difference;
    capital.output_description = "net investment income for the year in dollars";
    r.merges.push_back(capital);
    return r;
}

PerturbationRecipe default_series_recipe() {
    PerturbationRecipe r;
    NoiseSpec noise;
    noise.dist = NoiseSpec::Dist::Gaussian;
    noise.a = 1.0;  // mean
    noise.b = 0.1;  // sd
    noise.multiplicative = false;
    r.noise_specs["y"] = noise;
    r.shift = 1.0;
    r.hide_metadata = true;
    return r;
}

std::string recipe_to_json(const PerturbationRecipe& recipe) {
    json j;
    j["renames"] = recipe.renames;
    json noise = json::object();
    for (const auto& [name, spec] : recipe.noise_specs) {
        json s;
        s["dist"] = spec.dist == NoiseSpec::Dist::UniformInt ? "uniform_int" : "gaussian";
        s["a"] = spec.a;
        s["b"] = spec.b;
        if (spec.clamp_lo > -1e308) s["clamp_lo"] = spec.clamp_lo;
        if (spec.clamp_hi < 1e308) s["clamp_hi"] = spec.clamp_hi;
        if (spec.multiplicative) s["multiplicative"] = true;
        noise[name] = s;
    }
    j["noise_specs"] = noise;
    json scales = json::object();
    for (const auto& [name, sc] : recipe.scale_changes) {
        scales[name] = {{"factor", sc.factor}, {"new_name", sc.new_name}, {"new_unit", sc.new_unit}};
    }
    j["scale_changes"] = scales;
    j["merges"] = json::array();
    for (const auto& m : recipe.merges) {
        json mj = {{"inputs", m.inputs},
                   {"output", m.output},
                   {"combiner", m.combiner == MergeSpec::Combiner::Difference ? "difference" : "sum"}};
        if (!m.output_description.empty()) mj["output_description"] = m.output_description;
        j["merges"].push_back(mj);
    }
    json bins = json::object();
    for (const auto& [name, b] : recipe.binarizations) {
        bins[name] = {{"positive_levels", b.positive_levels},
                      {"positive_name", b.positive_name},
                      {"negative_name", b.negative_name}};
    }
    j["binarizations"] = bins;
    if (recipe.shift) j["shift"] = *recipe.shift;
    j["hide_metadata"] = recipe.hide_metadata;
    j["seed"] = recipe.seed;
    return j.dump(2) + "\n";
}

PerturbationRecipe recipe_from_json(const std::string& text) {
    PerturbationRecipe r;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidData(std::string("bad recipe JSON: ") + e.what());
    }
    if (j.contains("renames")) r.renames = j["renames"].get<std::map<std::string, std::string>>();
    if (j.contains("noise_specs")) {
        for (const auto& [name, s] : j["noise_specs"].items()) {
            NoiseSpec spec;
            spec.dist = s.value("dist", "gaussian") == "uniform_int" ? NoiseSpec::Dist::UniformInt
                                                                     : NoiseSpec::Dist::Gaussian;
            spec.a = s.value("a", 0.0);
            spec.b = s.value("b", 0.0);
            spec.clamp_lo = s.value("clamp_lo", -1e308);
            spec.clamp_hi = s.value("clamp_hi", 1e308);
            spec.multiplicative = s.value("multiplicative", false);
            r.noise_specs[name] = spec;
        }
    }
    if (j.contains("scale_changes")) {
        for (const auto& [name, s] : j["scale_changes"].items()) {
            ScaleChange sc;
            sc.factor = s.at("factor").get<double>();
            sc.new_name = s.value("new_name", name);
            sc.new_unit = s.value("new_unit", "");
            r.scale_changes[name] = sc;
        }
    }
    if (j.contains("merges")) {
        for (const auto& m : j["merges"]) {
            MergeSpec spec;
            spec.inputs = m.at("inputs").get<std::vector<std::string>>();
            spec.output = m.at("output").get<std::string>();
            spec.combiner = m.value("combiner", "difference") == "sum" ? MergeSpec::Combiner::Sum
                                                                       : MergeSpec::Combiner::Difference;
            spec.output_description = m.value("output_description", "");
            r.merges.push_back(spec);
        }
    }
    if (j.contains("binarizations")) {
        for (const auto& [name, b] : j["binarizations"].items()) {
            Binarization bin;
            bin.positive_levels = b.at("positive_levels").get<std::vector<std::string>>();
            bin.positive_name = b.value("positive_name", "yes");
            bin.negative_name = b.value("negative_name", "no");
            r.binarizations[name] = bin;
        }
    }
    if (j.contains("shift") && !j["shift"].is_null()) r.shift = j["shift"].get<double>();
    r.hide_metadata = j.value("hide_metadata", false);
    r.seed = j.value("seed", uint64_t{0});
    return r;
}

void save_recipe(const PerturbationRecipe& recipe, const std::string& path) {
    write_file_atomic(path, recipe_to_json(recipe));
}

PerturbationRecipe load_recipe(const std::string& path) {
    return recipe_from_json(read_file(path));
}

std::string recipe_hash(const PerturbationRecipe& recipe) {
    uint64_t h = fnv1a64(recipe_to_json(recipe));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// Numerize / verbalize

NumerizedDataset numerize(const TabularDataset& dataset) {
    dataset.validate();
    NumerizeInfo info;
    info.original_schema = dataset.schema;
    info.original_target = dataset.target_schema;

    // normalization statistics for the numeric columns
    auto [_, norm] = normalize_minmax(dataset);
    info.norm = norm;

    NumerizedDataset out;
    out.info = info;
    out.data = apply_numerize(dataset, info);
    return out;
}

TabularDataset apply_numerize(const TabularDataset& dataset, const NumerizeInfo& info) {
    if (dataset.schema.size() != info.original_schema.size())
        throw InvalidData("numerize info does not match dataset arity");
    TabularDataset out;
    out.schema.reserve(dataset.schema.size());
    for (size_t c = 0; c < dataset.schema.size(); ++c) {
        FeatureSchema fs;
        fs.name = "feature " + std::to_string(c);
        out.schema.push_back(fs);
    }
    if (info.original_target.categorical) {
        out.target_schema.name = "class";
        out.target_schema.categorical = true;
        for (size_t i = 0; i < info.original_target.levels.size(); ++i)
            out.target_schema.levels.push_back(std::to_string(i));
    } else {
        out.target_schema.name = "y";
    }

    for (const auto& row : dataset.rows) {
        Example ex;
        for (size_t c = 0; c < dataset.schema.size(); ++c) {
            const FeatureSchema& sem = info.original_schema[c];
            const FeatureValue& v = row.features[c];
            if (sem.categorical) {
                auto idx = sem.level_index(as_text(v));
                if (!idx) throw InvalidData("unknown level '" + as_text(v) + "' in '" + sem.name + "'");
                size_t n_levels = sem.levels.size();
                ex.features.push_back(n_levels == 1
                                          ? 1.0
                                          : static_cast<double>(*idx) / static_cast<double>(n_levels - 1));
            } else {
                const FeatureRange& r = info.norm.ranges[c];
                double v01 = (r.max > r.min) ? (as_number(v) - r.min) / (r.max - r.min) : 0.5;
                ex.features.push_back(v01);
            }
        }
        if (info.original_target.categorical) {
            auto idx = info.original_target.level_index(as_text(row.target));
            if (!idx) throw InvalidData("unknown target level '" + as_text(row.target) + "'");
            ex.target = std::to_string(*idx);
        } else {
            ex.target = as_number(row.target);
        }
        out.rows.push_back(std::move(ex));
    }
    return out;
}

const std::string& generic_classification_task() {
    static const std::string text =
        "Below you are asked to perform a classification task. In this task, you will be "
        "given some numerical features, and your task is to predict the class (0 or 1) given "
        "the features. An intuitive guess rather than an accurate estimate is enough.";
    return text;
}

const std::string& generic_regression_task() {
    static const std::string text =
        "this is a regression task where we predict y from x given some training data";
    return text;
}

TaskDescription decontextualize(const TaskDescription& task) {
    TaskDescription out;
    out.kind = task.kind;
    out.mode_tag = EvalMode::LikelihoodOnly;
    out.hint = std::nullopt;
    out.text = task.kind == TaskKind::Classification ? generic_classification_task()
                                                     : generic_regression_task();
    return out;
}

std::string render_number(double v, bool integral) {
    if (integral) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(std::llround(v)));
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string render_cell(const FeatureSchema& schema, const FeatureValue& value) {
    std::string rendered;
    if (is_numeric(value)) {
        bool integral = as_number(value) == std::round(as_number(value));
        rendered = render_number(as_number(value), integral);
    } else {
        rendered = as_text(value);
    }
    std::string out = schema.name + "=" + rendered;
    if (!schema.unit.empty() && is_numeric(value)) out += " " + schema.unit;
    return out;
}

TabularDataset verbalize(const TabularDataset& dataset, const NumerizeInfo& info) {
    if (dataset.schema.size() != info.original_schema.size())
        throw InvalidData("numerize info does not match dataset arity");
    TabularDataset out;
    out.schema = info.original_schema;
    out.target_schema = info.original_target;
    out.context = dataset.context;

    for (const auto& row : dataset.rows) {
        Example ex;
        for (size_t c = 0; c < dataset.schema.size(); ++c) {
            const FeatureSchema& sem = info.original_schema[c];
            const FeatureValue& v = row.features[c];
            if (sem.categorical) {
                if (!is_numeric(v)) {
                    if (!sem.level_index(as_text(v)))
                        throw InvalidData("value '" + as_text(v) + "' not a level of '" + sem.name + "'");
                    ex.features.push_back(v);
                } else {
                    size_t n_levels = sem.levels.size();
                    double scaled = n_levels == 1 ? 0.0 : as_number(v) * static_cast<double>(n_levels - 1);
                    double nearest = std::round(scaled);
                    if (std::abs(scaled - nearest) > 1e-6 || nearest < 0 ||
                        nearest >= static_cast<double>(n_levels))
                        throw InvalidData("cannot decode code " + format_double(as_number(v)) +
                                          " for '" + sem.name + "'");
                    ex.features.push_back(sem.levels[static_cast<size_t>(nearest)]);
                }
            } else {
                const FeatureRange& r = info.norm.ranges[c];
                double val = denormalize(as_number(v), r);
                if (r.used && r.integral) val = std::round(val);
                ex.features.push_back(val);
            }
        }
        // target: class indices decode back to level strings
        if (info.original_target.categorical) {
            const std::string& t = as_text(row.target);
            if (info.original_target.level_index(t)) {
                ex.target = t;
            } else {
                size_t idx = 0;
                try {
                    idx = static_cast<size_t>(std::stoul(t));
                } catch (...) {
                    throw InvalidData("cannot decode target '" + t + "'");
                }
                if (idx >= info.original_target.levels.size())
                    throw InvalidData("target index " + t + " out of range");
                ex.target = info.original_target.levels[idx];
            }
        } else {
            ex.target = row.target;
        }
        out.rows.push_back(std::move(ex));
    }
    return out;
}

std::string hint_for_domain(const std::string& domain_name) {
    return "during the process, please actively make use of any domain knowledge or prior "
           "information you know about " +
           domain_name + " and incorporate it with the patterns you see from the data.";
}

TaskDescription contextualize(const TaskDescription& task, const ContextBlock& ctx) {
    if (ctx.domain_name.empty()) throw InvalidContext("context has no domain name");
    TaskDescription out;
    out.kind = task.kind;
    out.mode_tag = EvalMode::PosteriorFull;

    std::ostringstream text;
    text << ctx.task_prose;
    if (!ctx.feature_explanations.empty()) {
        text << "\nThe features are:";
        for (const auto& [name, expl] : ctx.feature_explanations)
            text << "\n- " << name << ": " << expl;
    }
    if (!ctx.source_prose.empty()) text << "\n" << ctx.source_prose;
    out.text = text.str();
    out.hint = hint_for_domain(ctx.domain_name);
    return out;
}

// ---------------------------------------------------------------------------
// Perturbations

namespace {

TabularDataset perturb_tabular(const TabularDataset& dataset, const PerturbationRecipe& recipe,
                               uint64_t seed) {
    dataset.validate();
    recipe.validate(dataset.schema);
    TabularDataset out = dataset;
    Rng rng = Rng(seed).split("perturb");

    // additive noise, keyed by original feature name, one counter per row
    for (const auto& [name, spec] : recipe.noise_specs) {
        auto idx = out.feature_index(name);
        if (!idx || out.schema[*idx].categorical)
            throw InvalidData("noise target '" + name + "' is not a numeric feature");
        Rng stream = rng.split(name);
        for (size_t rI = 0; rI < out.rows.size(); ++rI) {
            double v = as_number(out.rows[rI].features[*idx]);
            if (spec.dist == NoiseSpec::Dist::UniformInt) {
                v += static_cast<double>(
                    stream.uniform_int(rI, static_cast<int64_t>(spec.a), static_cast<int64_t>(spec.b)));
            } else {
                double n = stream.normal(rI, spec.a, spec.b);
                v = spec.multiplicative ? v * n : v + n;
            }
            v = std::clamp(v, spec.clamp_lo, spec.clamp_hi);
            out.rows[rI].features[*idx] = v;
        }
    }

    for (const auto& [name, bin] : recipe.binarizations) {
        auto idx = out.feature_index(name);
        if (!idx || !out.schema[*idx].categorical)
            throw InvalidData("binarization target '" + name + "' is not categorical");
        std::set<std::string> positive(bin.positive_levels.begin(), bin.positive_levels.end());
        for (auto& row : out.rows) {
            const std::string& level = as_text(row.features[*idx]);
            row.features[*idx] = positive.count(level) ? bin.positive_name : bin.negative_name;
        }
        out.schema[*idx].levels = {bin.negative_name, bin.positive_name};
    }

    for (const auto& [name, sc] : recipe.scale_changes) {
        auto idx = out.feature_index(name);
        if (!idx || out.schema[*idx].categorical)
            throw InvalidData("scale target '" + name + "' is not numeric");
        for (auto& row : out.rows)
            row.features[*idx] = as_number(row.features[*idx]) * sc.factor;
        if (!sc.new_name.empty()) {
            if (out.context) {
                auto& expl = out.context->feature_explanations;
                auto it2 = expl.find(name);
                if (it2 != expl.end()) {
                    expl[sc.new_name] = it2->second;
                    expl.erase(it2);
                }
            }
            out.schema[*idx].name = sc.new_name;
        }
        out.schema[*idx].unit = sc.new_unit;
    }

    for (const auto& m : recipe.merges) {
        std::vector<size_t> in_idx;
        for (const auto& in : m.inputs) {
            auto idx = out.feature_index(in);
            if (!idx || out.schema[*idx].categorical)
                throw InvalidData("merge input '" + in + "' is not numeric");
            in_idx.push_back(*idx);
        }
        if (in_idx.empty()) throw InvalidData("merge with no inputs");
        size_t keep = in_idx[0];
        for (auto& row : out.rows) {
            double acc = as_number(row.features[in_idx[0]]);
            for (size_t k = 1; k < in_idx.size(); ++k) {
                double v = as_number(row.features[in_idx[k]]);
                acc = m.combiner == MergeSpec::Combiner::Difference ? acc - v : acc + v;
            }
            row.features[keep] = acc;
        }
        out.schema[keep].name = m.output;
        out.schema[keep].unit.clear();
        out.schema[keep].description.clear();
        if (out.context) {
            auto& expl = out.context->feature_explanations;
            for (const auto& in : m.inputs) expl.erase(in);
            if (!m.output_description.empty()) expl[m.output] = m.output_description;
        }
        // drop the consumed columns, highest index first
        std::vector<size_t> drop(in_idx.begin() + 1, in_idx.end());
        std::sort(drop.rbegin(), drop.rend());
        for (size_t d : drop) {
            out.schema.erase(out.schema.begin() + static_cast<long>(d));
            for (auto& row : out.rows)
                row.features.erase(row.features.begin() + static_cast<long>(d));
        }
    }

    for (const auto& [old_name, new_name] : recipe.renames) {
        auto idx = out.feature_index(old_name);
        if (!idx) continue; // consumed by a merge or already relabeled
        out.schema[*idx].name = new_name;
        if (out.context) {
            auto& expl = out.context->feature_explanations;
            auto it = expl.find(old_name);
            if (it != expl.end()) {
                expl[new_name] = it->second;
                expl.erase(it);
            }
        }
    }

    out.validate();
    return out;
}

} // namespace

TabularDataset perturb_adult(const TabularDataset& dataset, const PerturbationRecipe& recipe,
                             uint64_t seed) {
    if (dataset.n_features() != 13)
        throw InvalidData("expected the 13-feature census schema, got " +
                          std::to_string(dataset.n_features()) + " features");
    return perturb_tabular(dataset, recipe, seed);
}

SeriesDataset perturb_series(const SeriesDataset& series, const PerturbationRecipe& recipe,
                             uint64_t seed) {
    series.validate();
    SeriesDataset out = series;
    auto it = recipe.noise_specs.find("y");
    if (it != recipe.noise_specs.end()) {
        const NoiseSpec& spec = it->second;
        Rng stream = Rng(seed).split("perturb").split("y");
        for (size_t i = 0; i < out.points.size(); ++i) {
            double n = spec.dist == NoiseSpec::Dist::Gaussian
                           ? stream.normal(i, spec.a, spec.b)
                           : static_cast<double>(stream.uniform_int(i, static_cast<int64_t>(spec.a),
                                                                    static_cast<int64_t>(spec.b)));
            out.points[i].y = spec.multiplicative ? out.points[i].y * n : out.points[i].y + n;
        }
    }
    if (recipe.shift)
        for (auto& p : out.points) p.y += *recipe.shift;
    if (recipe.hide_metadata && out.context) out.context->source_prose.clear();
    return out;
}

} // namespace funcmod
