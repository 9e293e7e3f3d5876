#include <doctest.h>

#include <algorithm>
#include <set>

#include "featrec/error.hpp"
#include "featrec/eval.hpp"
#include "featrec/synthetic.hpp"
#include "helpers.hpp"

using namespace featrec;
using namespace featrec::eval;

namespace {

void check_plan(const FoldPlan& plan, const std::vector<int>& labels, int classes) {
    const std::size_t n = labels.size();
    std::vector<int> seen(n, 0);
    std::size_t lo = n, hi = 0;
    std::vector<std::size_t> cls_lo(classes, n), cls_hi(classes, 0);
    for (const auto& fold : plan.folds) {
        lo = std::min(lo, fold.size());
        hi = std::max(hi, fold.size());
        REQUIRE(std::is_sorted(fold.begin(), fold.end()));
        std::vector<std::size_t> per(classes, 0);
        for (std::size_t r : fold) {
            ++seen[r];
            ++per[labels[r]];
        }
        for (int c = 0; c < classes; ++c) {
            cls_lo[c] = std::min(cls_lo[c], per[c]);
            cls_hi[c] = std::max(cls_hi[c], per[c]);
        }
    }
    for (int s : seen) REQUIRE(s == 1);
    REQUIRE(hi - lo <= 1);
    for (int c = 0; c < classes; ++c) REQUIRE(cls_hi[c] - cls_lo[c] <= 1);
}

Dataset planted(std::uint64_t seed, std::size_t rows = 200) {
    PlantedConfig cfg;
    cfg.rows = rows;
    cfg.features = 8;
    return make_planted_dataset(cfg, seed);
}

}  // namespace

TEST_CASE("fold plans are disjoint, balanced and stratified") {
    Rng rng(1);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + rng.uniform_index(300);
        const std::size_t k = 2 + rng.uniform_index(std::min<std::size_t>(n - 1, 20));
        const int classes = 1 + static_cast<int>(rng.uniform_index(5));
        std::vector<int> labels(n);
        for (auto& y : labels) y = static_cast<int>(rng.uniform_index(classes));
        const auto plan = stratified_folds(labels, k, rng.next());
        REQUIRE(plan.folds.size() == k);
        check_plan(plan, labels, classes);
    }
}

TEST_CASE("fold plan examples") {
    std::vector<int> y416(416);
    for (std::size_t i = 0; i < 416; ++i) y416[i] = static_cast<int>(i % 4);
    const auto plan = stratified_folds(y416, 10, 3);
    for (const auto& f : plan.folds) CHECK((f.size() == 41 || f.size() == 42));

    const std::vector<int> five{0, 1, 0, 1, 1};
    const auto loo = stratified_folds(five, 5, 0);
    for (const auto& f : loo.folds) CHECK(f.size() == 1);

    std::vector<int> y(100);
    for (std::size_t i = 0; i < 100; ++i) y[i] = i < 60 ? 0 : 1;
    const auto p5 = stratified_folds(y, 5, 9);
    for (const auto& f : p5.folds) {
        CHECK(std::count_if(f.begin(), f.end(), [&](std::size_t r) { return y[r] == 0; }) == 12);
    }

    CHECK_THROWS_AS(stratified_folds(five, 6, 0), ContractError);
    CHECK_THROWS_AS(stratified_folds(five, 1, 0), ContractError);
}

TEST_CASE("training rows are the complement of the fold") {
    std::vector<int> y(23);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 3);
    const auto plan = stratified_folds(y, 4, 1);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto train = plan.training_rows(i);
        CHECK(train.size() + plan.folds[i].size() == 23);
        for (std::size_t r : plan.folds[i]) CHECK_FALSE(std::binary_search(train.begin(), train.end(), r));
    }
}

TEST_CASE("perturbing held-out rows leaves the fold's standardization unchanged") {
    Rng rng(2);
    const auto d = testutil::random_dataset(rng, 60, 4, 3);
    const auto plan = stratified_folds(d.labels, 5, 7);
    for (std::size_t i = 0; i < 5; ++i) {
        const auto before = fold_split(d.values, d.labels, plan, i);
        Matrix perturbed = d.values;
        for (std::size_t r : plan.folds[i]) {
            for (std::size_t j = 0; j < perturbed.cols(); ++j) perturbed(r, j) = 1e6 * rng.normal();
        }
        const auto after = fold_split(perturbed, d.labels, plan, i);
        CHECK(after.scaler.mean() == before.scaler.mean());
        CHECK(after.scaler.scale() == before.scaler.scale());
        CHECK(after.train_x == before.train_x);
    }
}

TEST_CASE("label-copy feature is classified perfectly by every classifier") {
    const auto d = testutil::label_copy_dataset(3, 80, 3, 4);
    const auto plan = stratified_folds(d.labels, 5, 1);
    const std::vector<std::size_t> feature{0};
    models::MlpParams nn;
    nn.adam.learning_rate = 0.05;
    nn.adam.epochs = 400;
    for (const ClassifierSpec& spec : {ClassifierSpec(nn), ClassifierSpec(models::SvmParams{}), ClassifierSpec(KnnParams{})}) {
        const auto r = cross_validate(d, feature, spec, plan, 4);
        CHECK(r.mean_accuracy == doctest::Approx(1.0));
        CHECK(r.pooled_accuracy == doctest::Approx(1.0));
    }
}

TEST_CASE("majority baseline sits at chance on balanced classes") {
    const auto d = testutil::label_copy_dataset(5, 400, 2, 4);
    const auto plan = stratified_folds(d.labels, 10, 2);
    const std::vector<std::size_t> f{1};
    const auto r = cross_validate(d, f, MajorityParams{}, plan);
    CHECK(r.mean_accuracy == doctest::Approx(0.25).epsilon(0.05));
    CHECK(r.classifier == "majority");
}

TEST_CASE("single-class training folds proceed with a note") {
    Matrix x(4, 1, {0.0, 1.0, 2.0, 3.0});
    const auto d = make_dataset(x, std::vector<long long>{0, 0, 0, 1});
    FoldPlan plan;
    plan.k = 2;
    plan.folds = {{0, 1, 2}, {3}};
    const std::vector<std::size_t> f{0};
    const auto r = cross_validate(d, f, models::SvmParams{}, plan);
    CHECK(r.fold_accuracy.size() == 2);
    CHECK_FALSE(r.fold_notes[0].empty());
}

TEST_CASE("cross-validation is deterministic and fold order does not change the mean") {
    const auto d = planted(4);
    const std::vector<std::size_t> f{0, 1, 2, 3};
    const auto plan = stratified_folds(d.labels, 5, 8);
    models::MlpParams nn;
    nn.adam.epochs = 60;
    const auto a = cross_validate(d, f, nn, plan, 3);
    const auto b = cross_validate(d, f, nn, plan, 3);
    CHECK(a.fold_accuracy == b.fold_accuracy);
    CHECK(a.mean_accuracy == b.mean_accuracy);

    FoldPlan reversed = plan;
    std::reverse(reversed.folds.begin(), reversed.folds.end());
    const auto k = cross_validate(d, f, KnnParams{}, plan);
    const auto kr = cross_validate(d, f, KnnParams{}, reversed);
    CHECK(k.mean_accuracy == kr.mean_accuracy);
}

TEST_CASE("accuracy curve shape and endpoints") {
    const auto d = planted(6);
    const auto plan = stratified_folds(d.labels, 5, 1);
    Ranking r{"ensemble", {0, 1, 2, 3, 4, 5, 6, 7}};
    const auto curve = accuracy_curve(d, r, KnnParams{}, plan);
    REQUIRE(curve.points.size() == 8);
    for (const auto& p : curve.points) {
        CHECK(p.mean_accuracy >= 0.0);
        CHECK(p.mean_accuracy <= 1.0);
    }
    const auto full = cross_validate(d, r.order, KnnParams{}, plan);
    CHECK(curve.points.back().mean_accuracy == full.mean_accuracy);
    const auto best = std::max_element(curve.points.begin(), curve.points.end(),
                                       [](const CurvePoint& a, const CurvePoint& b) { return a.mean_accuracy < b.mean_accuracy; });
    CHECK(best->k <= 6);

    const auto small = make_planted_dataset({60, 4, 0.0}, 1);
    const auto c3 = accuracy_curve(small, Ranking{"x", {2, 0, 1, 3}}, KnnParams{}, stratified_folds(small.labels, 3, 0));
    CHECK(c3.points.size() == 4);
}

TEST_CASE("grid search") {
    const auto d = planted(7, 160);
    const auto plan = stratified_folds(d.labels, 4, 2);
    const std::vector<std::size_t> f{0, 1, 2, 3};

    const auto single = grid_search(d, f, {KnnParams{5}}, plan);
    CHECK(single.best_index == 0);
    CHECK(single.leaderboard.size() == 1);

    models::SvmParams degenerate;
    degenerate.gamma = 1e9;
    models::SvmParams good;
    const auto g = grid_search(d, f, {degenerate, good}, plan);
    CHECK(g.leaderboard.size() == 2);
    CHECK(g.best_index == 1);
    CHECK(std::holds_alternative<models::SvmParams>(g.best()));
}

TEST_CASE("classifier names") {
    CHECK(classifier_name(models::MlpParams{}) == "nn");
    CHECK(classifier_name(models::SvmParams{}) == "svm");
    CHECK(classifier_name(KnnParams{}) == "knn");
}

TEST_CASE("planted dataset is balanced and seeded") {
    const auto d = make_planted_dataset({}, 3);
    CHECK(d.size() == 500);
    CHECK(d.feature_count() == 20);
    std::vector<int> counts(4, 0);
    for (int y : d.labels) ++counts[y];
    CHECK(counts == std::vector<int>{125, 125, 125, 125});
    CHECK(make_planted_dataset({}, 3).values == d.values);
    CHECK_FALSE(make_planted_dataset({}, 4).values == d.values);
    CHECK_THROWS_AS(make_planted_dataset({10, 3, 0.0}, 0), ConfigError);
}
