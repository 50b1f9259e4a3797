#pragma once

#include <string>
#include <vector>

#include "funcmod/dataset.hpp"

namespace funcmod {

struct FeatureSubset {
    std::vector<std::string> names;
    size_t k() const { return names.size(); }
};

// Discrete view of a dataset for histogram-based information estimates:
// categorical features keep their level index, numeric features fall into
// quantile bins, the target becomes a class index.
struct DiscretizedTable {
    std::vector<std::string> names;
    std::vector<std::vector<int>> columns; // per feature, one code per row
    std::vector<int> cardinality;
    std::vector<int> target;
    int target_cardinality = 0;
    size_t n_rows = 0;
};

DiscretizedTable discretize(const TabularDataset& dataset, int bins = 4);

// Plug-in joint mutual information I(X_S; Y) in bits from empirical
// frequencies over the selected feature tuple.
double joint_mi(const DiscretizedTable& table, const std::vector<size_t>& feature_idx);

double entropy_bits(const std::vector<int>& codes, int cardinality);

// Forward greedy selection: adds the feature maximizing the joint MI with the
// already-selected set, ties broken by schema order.
FeatureSubset mi_greedy(const TabularDataset& dataset, size_t k, int bins = 4);

// Enumerates all C(d, k) subsets (d <= 16) and keeps the best.
FeatureSubset mi_exhaustive(const TabularDataset& dataset, size_t k, int bins = 4);

// The MI actually achieved by a named subset, for comparisons.
double subset_mi(const TabularDataset& dataset, const FeatureSubset& subset, int bins = 4);

} // namespace funcmod
