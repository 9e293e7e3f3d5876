#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "featrec/data.hpp"
#include "featrec/models/mlp.hpp"
#include "featrec/models/svm.hpp"
#include "featrec/ranking.hpp"

namespace featrec::eval {

struct FoldPlan {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::size_t>> folds;  // row indices, ascending within a fold

    // Rows outside fold i, ascending.
    std::vector<std::size_t> training_rows(std::size_t i) const;
};

// Shuffles each class with the seed, lays the classes end to end and deals
// rows round-robin, so fold sizes and per-class counts differ by at most one.
FoldPlan stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed);

struct KnnParams {
    std::size_t k = 3;
};

// Predicts the most frequent training class.
struct MajorityParams {};

using ClassifierSpec = std::variant<models::MlpParams, models::SvmParams, KnnParams, MajorityParams>;

std::string classifier_name(const ClassifierSpec& spec);

// Trains on (train_x, train_y) and labels test_x. A training split holding a
// single class predicts that class.
std::vector<int> fit_predict(const ClassifierSpec& spec, const Matrix& train_x,
                             std::span<const int> train_y, int class_count, const Matrix& test_x,
                             std::uint64_t seed);

struct FoldSplit {
    Standardizer scaler;  // fitted on the training rows only
    Matrix train_x;
    Matrix test_x;
    std::vector<int> train_y;
    std::vector<int> test_y;
};

// Standardized training and held-out matrices for fold i.
FoldSplit fold_split(const Matrix& x, std::span<const int> labels, const FoldPlan& plan, std::size_t i);

struct CVReport {
    std::string classifier;
    std::vector<std::size_t> features;
    std::vector<double> fold_accuracy;
    std::vector<std::size_t> fold_size;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;    // population std over folds
    double pooled_accuracy = 0.0;  // correct / total over all folds
    std::vector<std::string> fold_notes;  // empty string when nothing to report
};

// Per fold: standardization fitted on the training rows only, model trained
// on them, accuracy on the held-out rows. Fold i uses derive_seed(seed, i).
CVReport cross_validate(const Dataset& d, std::span<const std::size_t> features,
                        const ClassifierSpec& spec, const FoldPlan& plan, std::uint64_t seed = 0);

struct CurvePoint {
    std::size_t k = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
};

struct AccuracyCurve {
    std::string classifier;
    std::vector<std::size_t> order;
    std::vector<CurvePoint> points;
};

// Point k cross-validates the first k ranked features, k = 1..NF.
AccuracyCurve accuracy_curve(const Dataset& d, const Ranking& ranking, const ClassifierSpec& spec,
                             const FoldPlan& plan, std::uint64_t seed = 0);

struct GridResult {
    std::size_t best_index = 0;
    std::vector<ClassifierSpec> grid;
    std::vector<CVReport> leaderboard;  // in grid order

    const ClassifierSpec& best() const { return grid[best_index]; }
    const CVReport& best_report() const { return leaderboard[best_index]; }
};

// Highest mean accuracy wins; ties keep the earliest grid entry.
GridResult grid_search(const Dataset& d, std::span<const std::size_t> features,
                       const std::vector<ClassifierSpec>& grid, const FoldPlan& plan,
                       std::uint64_t seed = 0);

}  // namespace featrec::eval
