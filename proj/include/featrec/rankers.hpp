#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "featrec/data.hpp"
#include "featrec/eval.hpp"
#include "featrec/infotheory.hpp"
#include "featrec/models/forest.hpp"
#include "featrec/ranking.hpp"

namespace featrec::rank {

// The eight base rankers, in positional-table column order.
enum class Method { random_forest, sfs, sbs, mifs, chi_squared, fscore, jmi, nmi };

inline constexpr std::array<Method, 8> kTableOrder = {
    Method::random_forest, Method::sfs,    Method::sbs, Method::mifs,
    Method::chi_squared,   Method::fscore, Method::jmi, Method::nmi,
};

std::string_view method_id(Method m);
Method parse_method(std::string_view id);  // throws ConfigError

// Scores a feature subset by cross-validated accuracy of an internal
// classifier (3-NN over 5 seeded stratified folds by default).
struct WrapperEvaluator {
    eval::ClassifierSpec classifier = eval::KnnParams{3};
    std::size_t folds = 5;
    std::uint64_t seed = 0;

    // Mean fold accuracy; deterministic for a fixed subset and seed.
    double evaluate(const Dataset& d, std::span<const std::size_t> features) const;
};

// Greedy MIFS: repeatedly take the feature maximizing I(f;C) - beta * sum_{s in S} I(f;s).
Ranking rank_mifs(const DiscretizedView& view, std::span<const int> labels, double beta = 0.5);

// Greedy JMI: first by I(f;C), then by sum_{s in S} I((f,s);C).
Ranking rank_jmi(const DiscretizedView& view, std::span<const int> labels);

// Greedy NMI: first by NMI(f;C), then NMI(f;C) - mean_{s in S} NMI(f;s).
Ranking rank_nmi(const DiscretizedView& view, std::span<const int> labels);

std::vector<double> chi_square_scores(const DiscretizedView& view, std::span<const int> labels);
Ranking rank_chi2(const DiscretizedView& view, std::span<const int> labels);

inline constexpr double kFisherEpsilon = 1e-12;

// sum_k n_k (mu_k - mu)^2 / (sum_k n_k sigma_k^2 + eps) per column, population variances.
std::vector<double> fisher_scores(const Matrix& x, std::span<const int> labels, int class_count);

// Standardizes the dataset, then orders features by Fisher score.
Ranking rank_fscore(const Dataset& d);

// Mean-decrease-impurity importance of a seeded random forest.
Ranking rank_random_forest(const Dataset& d, const models::ForestParams& params, std::uint64_t seed);

// Forward selection to completion; inclusion order is the ranking.
Ranking rank_sfs(const Dataset& d, const WrapperEvaluator& evaluator);

// Backward elimination; the last survivor is ranked first.
Ranking rank_sbs(const Dataset& d, const WrapperEvaluator& evaluator);

struct RankerConfig {
    std::size_t bins = kDefaultBins;
    double mifs_beta = 0.5;
    models::ForestParams forest;
    std::size_t wrapper_neighbors = 3;
    std::size_t wrapper_folds = 5;
    info::MiRankMode mi_mode = info::MiRankMode::one_vs_rest;
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError
};

// The eight rankings in kTableOrder. Seeds for the forest and the wrappers are
// derived from config.seed.
std::vector<Ranking> rank_all(const Dataset& d, const RankerConfig& config);

}  // namespace featrec::rank
