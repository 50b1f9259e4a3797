#include "funcmod/mi.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "funcmod/errors.hpp"

namespace funcmod {

DiscretizedTable discretize(const TabularDataset& dataset, int bins) {
    if (bins < 2) throw InvalidInput("need at least 2 bins");
    if (!dataset.target_schema.categorical)
        throw InvalidInput("mutual-information selection needs a categorical target");
    dataset.validate();

    DiscretizedTable t;
    t.n_rows = dataset.n_rows();
    t.target_cardinality = static_cast<int>(dataset.target_schema.levels.size());
    t.target.reserve(t.n_rows);
    for (const auto& row : dataset.rows)
        t.target.push_back(static_cast<int>(*dataset.target_schema.level_index(as_text(row.target))));

    for (size_t c = 0; c < dataset.schema.size(); ++c) {
        const FeatureSchema& fs = dataset.schema[c];
        t.names.push_back(fs.name);
        std::vector<int> codes(t.n_rows);
        if (fs.categorical) {
            for (size_t r = 0; r < t.n_rows; ++r)
                codes[r] = static_cast<int>(*fs.level_index(as_text(dataset.rows[r].features[c])));
            t.cardinality.push_back(static_cast<int>(fs.levels.size()));
        } else {
            // quantile thresholds; duplicate cut points collapse into one bin
            std::vector<double> values(t.n_rows);
            for (size_t r = 0; r < t.n_rows; ++r) values[r] = as_number(dataset.rows[r].features[c]);
            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            std::vector<double> cuts;
            for (int b = 1; b < bins; ++b) {
                size_t pos = std::min(t.n_rows - 1, t.n_rows * static_cast<size_t>(b) /
                                                        static_cast<size_t>(bins));
                double cut = sorted[pos];
                if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
            }
            for (size_t r = 0; r < t.n_rows; ++r) {
                int code = 0;
                for (double cut : cuts)
                    if (values[r] >= cut) ++code;
                codes[r] = code;
            }
            t.cardinality.push_back(static_cast<int>(cuts.size()) + 1);
        }
        t.columns.push_back(std::move(codes));
    }
    return t;
}

double entropy_bits(const std::vector<int>& codes, int cardinality) {
    std::vector<size_t> counts(static_cast<size_t>(cardinality), 0);
    for (int c : codes) ++counts[static_cast<size_t>(c)];
    double n = static_cast<double>(codes.size());
    double h = 0.0;
    for (size_t cnt : counts) {
        if (cnt == 0) continue;
        double p = static_cast<double>(cnt) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double joint_mi(const DiscretizedTable& table, const std::vector<size_t>& feature_idx) {
    if (table.n_rows == 0) return 0.0;
    // composite code for the selected tuple
    std::vector<uint64_t> keys(table.n_rows, 0);
    uint64_t stride = 1;
    for (size_t f : feature_idx) {
        if (f >= table.columns.size()) throw InvalidInput("feature index out of range");
        const auto& col = table.columns[f];
        for (size_t r = 0; r < table.n_rows; ++r)
            keys[r] += stride * static_cast<uint64_t>(col[r]);
        stride *= static_cast<uint64_t>(table.cardinality[f]);
    }

    std::unordered_map<uint64_t, size_t> x_counts;
    std::unordered_map<uint64_t, size_t> xy_counts;
    std::vector<size_t> y_counts(static_cast<size_t>(table.target_cardinality), 0);
    uint64_t y_stride = stride;
    for (size_t r = 0; r < table.n_rows; ++r) {
        ++x_counts[keys[r]];
        ++y_counts[static_cast<size_t>(table.target[r])];
        ++xy_counts[keys[r] + y_stride * static_cast<uint64_t>(table.target[r])];
    }

    double n = static_cast<double>(table.n_rows);
    double mi = 0.0;
    for (const auto& [key, cnt] : xy_counts) {
        uint64_t xkey = key % y_stride;
        uint64_t y = key / y_stride;
        double pxy = static_cast<double>(cnt) / n;
        double px = static_cast<double>(x_counts.at(xkey)) / n;
        double py = static_cast<double>(y_counts[static_cast<size_t>(y)]) / n;
        mi += pxy * std::log2(pxy / (px * py));
    }
    return std::max(0.0, mi);
}

FeatureSubset mi_greedy(const TabularDataset& dataset, size_t k, int bins) {
    if (k > dataset.n_features()) throw InvalidInput("k exceeds the feature count");
    DiscretizedTable table = discretize(dataset, bins);

    std::vector<size_t> chosen;
    std::vector<bool> used(table.columns.size(), false);
    for (size_t step = 0; step < k; ++step) {
        double best = -1.0;
        size_t best_idx = 0;
        for (size_t f = 0; f < table.columns.size(); ++f) {
            if (used[f]) continue;
            std::vector<size_t> candidate = chosen;
            candidate.push_back(f);
            double mi = joint_mi(table, candidate);
            if (mi > best + 1e-12) { // strict improvement; ties keep schema order
                best = mi;
                best_idx = f;
            }
        }
        chosen.push_back(best_idx);
        used[best_idx] = true;
    }
    std::sort(chosen.begin(), chosen.end());
    FeatureSubset out;
    for (size_t f : chosen) out.names.push_back(table.names[f]);
    return out;
}

FeatureSubset mi_exhaustive(const TabularDataset& dataset, size_t k, int bins) {
    size_t d = dataset.n_features();
    if (k > d) throw InvalidInput("k exceeds the feature count");
    if (d > 16) throw InvalidInput("exhaustive search is limited to 16 features");
    DiscretizedTable table = discretize(dataset, bins);

    std::vector<size_t> idx(k);
    for (size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<size_t> best_idx = idx;
    double best = -1.0;
    while (true) {
        double mi = joint_mi(table, idx);
        if (mi > best + 1e-12) {
            best = mi;
            best_idx = idx;
        }
        // next combination in lexicographic order
        size_t i = k;
        while (i-- > 0) {
            if (idx[i] < d - (k - i)) {
                ++idx[i];
                for (size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) {
                FeatureSubset out;
                for (size_t f : best_idx) out.names.push_back(table.names[f]);
                return out;
            }
        }
        if (k == 0) break;
    }
    FeatureSubset out;
    for (size_t f : best_idx) out.names.push_back(table.names[f]);
    return out;
}

double subset_mi(const TabularDataset& dataset, const FeatureSubset& subset, int bins) {
    DiscretizedTable table = discretize(dataset, bins);
    std::vector<size_t> idx;
    for (const auto& name : subset.names) {
        auto it = std::find(table.names.begin(), table.names.end(), name);
        if (it == table.names.end()) throw InvalidInput("unknown feature '" + name + "'");
        idx.push_back(static_cast<size_t>(it - table.names.begin()));
    }
    return joint_mi(table, idx);
}

} // namespace funcmod
