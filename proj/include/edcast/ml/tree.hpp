#pragma once

#include "edcast/features/matrix.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace edcast::ml {

struct TreeNode {
    int feature = -1;          // -1 for leaves
    bool categorical = false;
    double threshold = 0.0;    // numeric: go left when x <= threshold
    std::uint64_t left_levels = 0;  // categorical: bit (level - 1) set -> left
    int left = -1, right = -1;
    double value = 0.0;        // leaf prediction (also kept on inner nodes)
    double weight = 0.0;       // training weight reaching the node
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(const double* row) const;
    std::size_t leaves() const;
    /// Features used by at least one split.
    std::vector<int> split_features() const;

    nlohmann::json to_json() const;
    static Tree from_json(const nlohmann::json& j);
};

struct CartOptions {
    int max_depth = std::numeric_limits<int>::max();
    double min_node = 1.0;  // minimum total weight in each child
    std::size_t mtry = 0;   // candidate features per split; 0 = all
};

/// Least-squares regression tree on raw feature columns. Numeric and flag
/// features split on midpoints between consecutive distinct values;
/// categorical features split on prefixes of levels ordered by mean target.
/// Rows with zero weight are ignored. The first best split wins ties
/// (features in candidate order, thresholds ascending).
Tree grow_tree(const std::vector<const std::vector<double>*>& columns,
               const std::vector<features::FeatureKind>& kinds, const std::vector<double>& y,
               const std::vector<double>& weight, const CartOptions& options, std::mt19937_64* rng);

} // namespace edcast::ml
