#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "featrec/matrix.hpp"

namespace featrec::models {

struct ForestParams {
    std::size_t trees = 200;
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_samples_split = 2;
    std::size_t max_features = 0;  // 0 = ceil(sqrt(width))
    bool bootstrap = true;

    void validate() const;  // throws ConfigError
};

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;  // rows with value <= threshold go left
    // n * gini(node) - n_left * gini(left) - n_right * gini(right), in samples.
    double impurity_decrease = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> class_counts;

    bool is_leaf() const noexcept { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    int predict(std::span<const double> row) const;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::vector<std::uint64_t> tree_seeds;
    std::size_t feature_count = 0;
    int class_count = 0;

    // Majority vote over trees; ties to the lowest class.
    std::vector<int> predict(const Matrix& rows) const;
};

// CART trees with the Gini criterion on bootstrap samples. Each split draws
// features without replacement until max_features splittable ones are seen,
// so a constant column never splits.
ForestModel forest_train(const Matrix& x, std::span<const int> labels, int class_count,
                         const ForestParams& params, std::uint64_t seed);

// Mean decrease in impurity per feature, summed over trees and normalized to
// sum 1 (uniform when no split happened).
std::vector<double> forest_importance(const ForestModel& model);

}  // namespace featrec::models
