#include "featrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "featrec/error.hpp"
#include "featrec/models/knn.hpp"
#include "featrec/random.hpp"

namespace featrec::eval {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int majority_class(std::span<const int> labels, int class_count) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(class_count, 1)), 0);
    for (int y : labels) ++counts[static_cast<std::size_t>(y)];
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

std::vector<std::size_t> FoldPlan::training_rows(std::size_t i) const {
    std::vector<std::size_t> rows;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        if (f != i) rows.insert(rows.end(), folds[f].begin(), folds[f].end());
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

FoldPlan stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ContractError("cross-validation needs at least 2 folds");
    if (k > labels.size()) {
        throw ContractError("fold count " + std::to_string(k) + " exceeds row count " +
                            std::to_string(labels.size()));
    }
    int classes = 0;
    for (int y : labels) {
        if (y < 0) throw ContractError("labels must be nonnegative");
        classes = std::max(classes, y + 1);
    }
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(classes));
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);

    Rng rng(seed);
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.folds.assign(k, {});
    std::size_t position = 0;
    for (auto& rows : by_class) {
        rng.shuffle(rows);
        for (std::size_t r : rows) plan.folds[position++ % k].push_back(r);
    }
    for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
    return plan;
}

std::string classifier_name(const ClassifierSpec& spec) {
    return std::visit(overloaded{
                          [](const models::MlpParams&) { return std::string("nn"); },
                          [](const models::SvmParams&) { return std::string("svm"); },
                          [](const KnnParams&) { return std::string("knn"); },
                          [](const MajorityParams&) { return std::string("majority"); },
                      },
                      spec);
}

std::vector<int> fit_predict(const ClassifierSpec& spec, const Matrix& train_x,
                             std::span<const int> train_y, int class_count, const Matrix& test_x,
                             std::uint64_t seed) {
    if (train_y.empty()) throw ContractError("empty training split");
    const std::set<int> present(train_y.begin(), train_y.end());
    if (present.size() < 2 || std::holds_alternative<MajorityParams>(spec)) {
        return std::vector<int>(test_x.rows(), majority_class(train_y, class_count));
    }
    return std::visit(
        overloaded{
            [&](const models::MlpParams& p) {
                auto params = p;
                params.adam.seed = seed;
                return models::mlp_predict(models::mlp_train(train_x, train_y, class_count, params), test_x);
            },
            [&](const models::SvmParams& p) {
                return models::svm_predict(models::svm_train(train_x, train_y, class_count, p), test_x);
            },
            [&](const KnnParams& p) {
                return models::knn_predict(train_x, train_y, std::min(p.k, train_x.rows()), test_x);
            },
            [&](const MajorityParams&) {
                return std::vector<int>(test_x.rows(), majority_class(train_y, class_count));
            },
        },
        spec);
}

FoldSplit fold_split(const Matrix& x, std::span<const int> labels, const FoldPlan& plan, std::size_t i) {
    const auto& test_rows = plan.folds.at(i);
    const auto train_rows = plan.training_rows(i);
    FoldSplit s;
    for (std::size_t r : train_rows) s.train_y.push_back(labels[r]);
    for (std::size_t r : test_rows) s.test_y.push_back(labels[r]);
    const Matrix train_raw = x.select_rows(train_rows);
    s.scaler = Standardizer::fit(train_raw);
    s.train_x = s.scaler.apply(train_raw);
    s.test_x = s.scaler.apply(x.select_rows(test_rows));
    return s;
}

CVReport cross_validate(const Dataset& d, std::span<const std::size_t> features,
                        const ClassifierSpec& spec, const FoldPlan& plan, std::uint64_t seed) {
    if (features.empty()) throw ContractError("cross-validation needs at least one feature");
    for (std::size_t f : features) {
        if (f >= d.feature_count()) throw ContractError("feature index out of range");
    }
    const Matrix x = d.values.select_columns(features);

    CVReport report;
    report.classifier = classifier_name(spec);
    report.features.assign(features.begin(), features.end());
    std::size_t correct_total = 0;
    std::size_t rows_total = 0;

    for (std::size_t i = 0; i < plan.folds.size(); ++i) {
        const auto& test_rows = plan.folds[i];
        const auto split = fold_split(x, d.labels, plan, i);
        const auto& train_y = split.train_y;

        std::string note;
        if (std::set<int>(train_y.begin(), train_y.end()).size() < 2) {
            note = "single-class training split; predicted that class";
        }
        const auto predicted = fit_predict(spec, split.train_x, train_y, d.class_count, split.test_x, derive_seed(seed, i));
        std::size_t correct = 0;
        for (std::size_t t = 0; t < test_rows.size(); ++t) {
            if (predicted[t] == d.labels[test_rows[t]]) ++correct;
        }
        const double acc = test_rows.empty() ? 0.0
                                             : static_cast<double>(correct) / static_cast<double>(test_rows.size());
        report.fold_accuracy.push_back(acc);
        report.fold_size.push_back(test_rows.size());
        report.fold_notes.push_back(std::move(note));
        correct_total += correct;
        rows_total += test_rows.size();
    }

    // Sorted before reduction so the mean does not depend on fold order.
    auto sorted = report.fold_accuracy;
    std::sort(sorted.begin(), sorted.end());
    const double k = static_cast<double>(sorted.size());
    report.mean_accuracy = std::accumulate(sorted.begin(), sorted.end(), 0.0) / k;
    double ss = 0.0;
    for (double a : sorted) ss += (a - report.mean_accuracy) * (a - report.mean_accuracy);
    report.std_accuracy = std::sqrt(ss / k);
    report.pooled_accuracy = rows_total == 0 ? 0.0
                                             : static_cast<double>(correct_total) / static_cast<double>(rows_total);
    return report;
}

AccuracyCurve accuracy_curve(const Dataset& d, const Ranking& ranking, const ClassifierSpec& spec,
                             const FoldPlan& plan, std::uint64_t seed) {
    require_permutation(ranking.order, d.feature_count(), "ranking");
    AccuracyCurve curve;
    curve.classifier = classifier_name(spec);
    curve.order = ranking.order;
    for (std::size_t k = 1; k <= ranking.order.size(); ++k) {
        const auto report = cross_validate(d, std::span(ranking.order).first(k), spec, plan, seed);
        curve.points.push_back({k, report.mean_accuracy, report.std_accuracy});
    }
    return curve;
}

GridResult grid_search(const Dataset& d, std::span<const std::size_t> features,
                       const std::vector<ClassifierSpec>& grid, const FoldPlan& plan, std::uint64_t seed) {
    if (grid.empty()) throw ContractError("grid search needs at least one configuration");
    GridResult result;
    result.grid = grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        result.leaderboard.push_back(cross_validate(d, features, grid[i], plan, seed));
        if (result.leaderboard[i].mean_accuracy > result.leaderboard[result.best_index].mean_accuracy) {
            result.best_index = i;
        }
    }
    return result;
}

}  // namespace featrec::eval
