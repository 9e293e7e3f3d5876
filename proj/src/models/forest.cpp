#include "featrec/models/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "featrec/error.hpp"
#include "featrec/random.hpp"

namespace featrec::models {
namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double decrease = -1.0;
};

// n * gini for a count vector.
double weighted_gini(std::span<const double> counts, double n) {
    if (n <= 0.0) return 0.0;
    double sq = 0.0;
    for (double c : counts) sq += c * c;
    return n - sq / n;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const int> labels, std::size_t classes,
                const ForestParams& params, std::size_t max_features, Rng& rng)
        : x_(x), labels_(labels), classes_(classes), params_(params), max_features_(max_features),
          rng_(rng) {}

    DecisionTree build(std::vector<std::size_t> samples) {
        DecisionTree tree;
        samples_ = std::move(samples);
        struct Task {
            std::size_t begin, end, depth;
            int node;
        };
        tree.nodes.emplace_back();
        std::vector<Task> stack{{0, samples_.size(), 0, 0}};
        while (!stack.empty()) {
            const Task task = stack.back();
            stack.pop_back();
            auto counts = class_counts(task.begin, task.end);
            const double n = static_cast<double>(task.end - task.begin);
            tree.nodes[task.node].class_counts = counts;

            const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
            const bool depth_limited = params_.max_depth > 0 && task.depth >= params_.max_depth;
            if (pure || depth_limited || task.end - task.begin < params_.min_samples_split) continue;

            const Split split = find_split(task.begin, task.end, weighted_gini(counts, n));
            if (split.feature < 0) continue;

            const auto mid = std::partition(
                samples_.begin() + static_cast<std::ptrdiff_t>(task.begin),
                samples_.begin() + static_cast<std::ptrdiff_t>(task.end), [&](std::size_t s) {
                    return x_(s, static_cast<std::size_t>(split.feature)) <= split.threshold;
                });
            const auto cut = static_cast<std::size_t>(mid - samples_.begin());

            const int left = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            const int right = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            auto& node = tree.nodes[task.node];
            node.feature = split.feature;
            node.threshold = split.threshold;
            node.impurity_decrease = std::max(split.decrease, 0.0);
            node.left = left;
            node.right = right;
            stack.push_back({cut, task.end, task.depth + 1, right});
            stack.push_back({task.begin, cut, task.depth + 1, left});
        }
        return tree;
    }

private:
    std::vector<double> class_counts(std::size_t begin, std::size_t end) const {
        std::vector<double> counts(classes_, 0.0);
        for (std::size_t i = begin; i < end; ++i) counts[static_cast<std::size_t>(labels_[samples_[i]])] += 1.0;
        return counts;
    }

    Split find_split(std::size_t begin, std::size_t end, double parent_impurity) {
        std::vector<std::size_t> features(x_.cols());
        std::iota(features.begin(), features.end(), 0);
        rng_.shuffle(features);

        Split best;
        std::size_t evaluated = 0;
        for (std::size_t f : features) {
            if (evaluated >= max_features_) break;
            if (evaluate_feature(f, begin, end, parent_impurity, best)) ++evaluated;
        }
        return best;
    }

    // Returns false when the feature is constant on the node.
    bool evaluate_feature(std::size_t f, std::size_t begin, std::size_t end, double parent_impurity,
                          Split& best) {
        const std::size_t n = end - begin;
        scratch_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t s = samples_[begin + i];
            scratch_[i] = {x_(s, f), labels_[s]};
        }
        std::sort(scratch_.begin(), scratch_.end());
        if (scratch_.front().first == scratch_.back().first) return false;

        std::vector<double> left(classes_, 0.0);
        std::vector<double> right(classes_, 0.0);
        for (const auto& [v, y] : scratch_) right[static_cast<std::size_t>(y)] += 1.0;

        for (std::size_t i = 0; i + 1 < n; ++i) {
            const auto y = static_cast<std::size_t>(scratch_[i].second);
            left[y] += 1.0;
            right[y] -= 1.0;
            const double lo = scratch_[i].first;
            const double hi = scratch_[i + 1].first;
            if (lo == hi) continue;
            const double nl = static_cast<double>(i + 1);
            const double nr = static_cast<double>(n - i - 1);
            const double decrease = parent_impurity - weighted_gini(left, nl) - weighted_gini(right, nr);
            if (decrease > best.decrease) {
                double threshold = lo + (hi - lo) / 2.0;
                if (!(threshold < hi)) threshold = lo;
                best = {static_cast<int>(f), threshold, decrease};
            }
        }
        return true;
    }

    const Matrix& x_;
    std::span<const int> labels_;
    std::size_t classes_;
    const ForestParams& params_;
    std::size_t max_features_;
    Rng& rng_;
    std::vector<std::size_t> samples_;
    std::vector<std::pair<double, int>> scratch_;
};

}  // namespace

void ForestParams::validate() const {
    if (trees < 1) throw ConfigError("forest needs at least one tree");
    if (min_samples_split < 2) throw ConfigError("min_samples_split must be at least 2");
}

int DecisionTree::predict(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& node = nodes[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                  : node.right);
    }
    const auto& counts = nodes[i].class_counts;
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::vector<int> ForestModel::predict(const Matrix& rows) const {
    if (rows.rows() > 0 && rows.cols() != feature_count) throw ContractError("input width mismatch");
    std::vector<int> out(rows.rows());
    std::vector<std::size_t> votes(static_cast<std::size_t>(class_count));
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        std::fill(votes.begin(), votes.end(), 0);
        for (const auto& tree : trees) ++votes[static_cast<std::size_t>(tree.predict(rows.row(r)))];
        out[r] = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
    return out;
}

ForestModel forest_train(const Matrix& x, std::span<const int> labels, int class_count,
                         const ForestParams& params, std::uint64_t seed) {
    params.validate();
    if (labels.size() != x.rows()) throw ContractError("label count does not match row count");
    if (x.rows() == 0 || x.cols() == 0) throw ContractError("training data is empty");
    std::set<int> present;
    for (int y : labels) {
        if (y < 0 || y >= class_count) throw ContractError("label out of range");
        present.insert(y);
    }
    if (present.size() < 2) throw DegenerateLabelError("forest training needs at least two classes");

    const std::size_t width = x.cols();
    const std::size_t max_features =
        params.max_features > 0
            ? std::min(params.max_features, width)
            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(width))));

    ForestModel model;
    model.feature_count = width;
    model.class_count = class_count;
    const std::size_t n = x.rows();
    for (std::size_t t = 0; t < params.trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(seed, t);
        Rng rng(tree_seed);
        std::vector<std::size_t> samples(n);
        if (params.bootstrap) {
            for (auto& s : samples) s = rng.uniform_index(n);
        } else {
            std::iota(samples.begin(), samples.end(), 0);
        }
        TreeBuilder builder(x, labels, static_cast<std::size_t>(class_count), params, max_features, rng);
        model.trees.push_back(builder.build(std::move(samples)));
        model.tree_seeds.push_back(tree_seed);
    }
    return model;
}

std::vector<double> forest_importance(const ForestModel& model) {
    std::vector<double> importance(model.feature_count, 0.0);
    for (const auto& tree : model.trees) {
        for (const auto& node : tree.nodes) {
            if (!node.is_leaf()) importance[static_cast<std::size_t>(node.feature)] += node.impurity_decrease;
        }
    }
    const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
    if (total <= 0.0) {
        std::fill(importance.begin(), importance.end(), 1.0 / static_cast<double>(importance.size()));
    } else {
        for (double& v : importance) v /= total;
    }
    return importance;
}

}  // namespace featrec::models
