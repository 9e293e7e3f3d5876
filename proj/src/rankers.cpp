#include "featrec/rankers.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "featrec/error.hpp"
#include "featrec/random.hpp"

namespace featrec::rank {
namespace {

constexpr std::uint64_t kForestStream = 101;
constexpr std::uint64_t kWrapperStream = 202;

// Among unselected features, the one with the highest score; ties to the lower index.
std::size_t best_candidate(std::span<const double> scores, const std::vector<bool>& selected) {
    std::size_t best = scores.size();
    for (std::size_t f = 0; f < scores.size(); ++f) {
        if (selected[f]) continue;
        if (best == scores.size() || score_greater(scores[f], scores[best])) best = f;
    }
    return best;
}

// Generic greedy forward loop. `update` folds the newly selected feature into
// the per-candidate scores before the next pick.
std::vector<std::size_t> greedy_order(std::vector<double> scores,
                                      const std::function<void(std::size_t, std::size_t, std::vector<double>&,
                                                               const std::vector<bool>&)>& update) {
    const std::size_t nf = scores.size();
    std::vector<bool> selected(nf, false);
    std::vector<std::size_t> order;
    order.reserve(nf);
    for (std::size_t step = 0; step < nf; ++step) {
        const std::size_t pick = best_candidate(scores, selected);
        selected[pick] = true;
        order.push_back(pick);
        if (step + 1 < nf) update(pick, step + 1, scores, selected);
    }
    return order;
}

std::vector<double> class_relevance(const DiscretizedView& view, std::span<const int> labels) {
    std::vector<double> rel(view.feature_count());
    for (std::size_t f = 0; f < rel.size(); ++f) rel[f] = info::mutual_information(view.column(f), labels);
    return rel;
}

void require_labels(const DiscretizedView& view, std::span<const int> labels) {
    if (labels.size() != view.size()) throw ContractError("label count does not match view rows");
}

void require_complete(const Dataset& d) {
    if (d.has_missing()) throw ContractError("ranking requires complete data; call drop_missing first");
    if (d.feature_count() == 0) throw ContractError("dataset has no features");
}

}  // namespace

std::string_view method_id(Method m) {
    switch (m) {
        case Method::random_forest: return "random_forest";
        case Method::sfs: return "sfs";
        case Method::sbs: return "sbs";
        case Method::mifs: return "mifs";
        case Method::chi_squared: return "chi_squared";
        case Method::fscore: return "fscore";
        case Method::jmi: return "jmi";
        case Method::nmi: return "nmi";
    }
    return "unknown";
}

Method parse_method(std::string_view id) {
    for (Method m : kTableOrder) {
        if (method_id(m) == id) return m;
    }
    throw ConfigError("unknown ranking method '" + std::string(id) + "'");
}

double WrapperEvaluator::evaluate(const Dataset& d, std::span<const std::size_t> features) const {
    const std::size_t k = std::max<std::size_t>(2, std::min(folds, d.size()));
    const auto plan = eval::stratified_folds(d.labels, k, seed);
    return eval::cross_validate(d, features, classifier, plan, seed).mean_accuracy;
}

Ranking rank_mifs(const DiscretizedView& view, std::span<const int> labels, double beta) {
    require_labels(view, labels);
    if (beta < 0.0) throw ConfigError("MIFS beta must be nonnegative");
    const auto relevance = class_relevance(view, labels);
    std::vector<double> redundancy(relevance.size(), 0.0);
    auto order = greedy_order(relevance, [&](std::size_t last, std::size_t, std::vector<double>& scores,
                                             const std::vector<bool>& selected) {
        for (std::size_t f = 0; f < scores.size(); ++f) {
            if (selected[f]) continue;
            if (beta > 0.0) redundancy[f] += info::mutual_information(view.column(f), view.column(last));
            scores[f] = relevance[f] - beta * redundancy[f];
        }
    });
    return Ranking{std::string(method_id(Method::mifs)), std::move(order)};
}

Ranking rank_jmi(const DiscretizedView& view, std::span<const int> labels) {
    require_labels(view, labels);
    const auto relevance = class_relevance(view, labels);
    std::vector<double> joint(relevance.size(), 0.0);
    auto order = greedy_order(relevance, [&](std::size_t last, std::size_t, std::vector<double>& scores,
                                             const std::vector<bool>& selected) {
        for (std::size_t f = 0; f < scores.size(); ++f) {
            if (selected[f]) continue;
            joint[f] += info::joint_mutual_information(view.column(f), view.column(last), labels);
            scores[f] = joint[f];
        }
    });
    return Ranking{std::string(method_id(Method::jmi)), std::move(order)};
}

Ranking rank_nmi(const DiscretizedView& view, std::span<const int> labels) {
    require_labels(view, labels);
    std::vector<double> relevance(view.feature_count());
    for (std::size_t f = 0; f < relevance.size(); ++f) {
        relevance[f] = info::normalized_mutual_information(view.column(f), labels);
    }
    std::vector<double> redundancy(relevance.size(), 0.0);
    auto order = greedy_order(relevance, [&](std::size_t last, std::size_t selected_count,
                                             std::vector<double>& scores, const std::vector<bool>& selected) {
        for (std::size_t f = 0; f < scores.size(); ++f) {
            if (selected[f]) continue;
            redundancy[f] += info::normalized_mutual_information(view.column(f), view.column(last));
            scores[f] = relevance[f] - redundancy[f] / static_cast<double>(selected_count);
        }
    });
    return Ranking{std::string(method_id(Method::nmi)), std::move(order)};
}

std::vector<double> chi_square_scores(const DiscretizedView& view, std::span<const int> labels) {
    require_labels(view, labels);
    std::vector<double> scores(view.feature_count());
    for (std::size_t f = 0; f < scores.size(); ++f) {
        scores[f] = info::ContingencyTable(view.column(f), labels).chi_square();
    }
    return scores;
}

Ranking rank_chi2(const DiscretizedView& view, std::span<const int> labels) {
    return Ranking{std::string(method_id(Method::chi_squared)), order_by_score(chi_square_scores(view, labels))};
}

std::vector<double> fisher_scores(const Matrix& x, std::span<const int> labels, int class_count) {
    if (labels.size() != x.rows()) throw ContractError("label count does not match row count");
    if (std::set<int>(labels.begin(), labels.end()).size() < 2) {
        throw DegenerateLabelError("F-score needs at least two classes");
    }
    const auto classes = static_cast<std::size_t>(class_count);
    std::vector<double> counts(classes, 0.0);
    for (int y : labels) counts[static_cast<std::size_t>(y)] += 1.0;

    std::vector<double> scores(x.cols());
    std::vector<double> sum(classes);
    std::vector<double> sq(classes);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        std::fill(sum.begin(), sum.end(), 0.0);
        double total = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            sum[static_cast<std::size_t>(labels[r])] += x(r, j);
            total += x(r, j);
        }
        const double mu = total / static_cast<double>(x.rows());
        std::fill(sq.begin(), sq.end(), 0.0);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const auto k = static_cast<std::size_t>(labels[r]);
            const double dev = x(r, j) - sum[k] / counts[k];
            sq[k] += dev * dev;
        }
        double between = 0.0;
        double within = 0.0;
        for (std::size_t k = 0; k < classes; ++k) {
            if (counts[k] == 0.0) continue;
            const double mk = sum[k] / counts[k];
            between += counts[k] * (mk - mu) * (mk - mu);
            within += sq[k];  // n_k * sigma_k^2
        }
        scores[j] = between / (within + kFisherEpsilon);
    }
    return scores;
}

Ranking rank_fscore(const Dataset& d) {
    require_complete(d);
    const auto standardized = standardize(d);
    return Ranking{std::string(method_id(Method::fscore)),
                   order_by_score(fisher_scores(standardized.data.values, d.labels, d.class_count))};
}

Ranking rank_random_forest(const Dataset& d, const models::ForestParams& params, std::uint64_t seed) {
    require_complete(d);
    const auto model = models::forest_train(d.values, d.labels, d.class_count, params, seed);
    return Ranking{std::string(method_id(Method::random_forest)), order_by_score(models::forest_importance(model))};
}

Ranking rank_sfs(const Dataset& d, const WrapperEvaluator& evaluator) {
    require_complete(d);
    const std::size_t nf = d.feature_count();
    std::vector<std::size_t> chosen;
    std::vector<bool> used(nf, false);
    std::vector<std::size_t> subset;
    while (chosen.size() < nf) {
        std::size_t best = nf;
        double best_acc = 0.0;
        for (std::size_t f = 0; f < nf; ++f) {
            if (used[f]) continue;
            subset = chosen;
            subset.push_back(f);
            const double acc = evaluator.evaluate(d, subset);
            if (best == nf || score_greater(acc, best_acc)) {
                best = f;
                best_acc = acc;
            }
        }
        used[best] = true;
        chosen.push_back(best);
    }
    return Ranking{std::string(method_id(Method::sfs)), std::move(chosen)};
}

Ranking rank_sbs(const Dataset& d, const WrapperEvaluator& evaluator) {
    require_complete(d);
    const std::size_t nf = d.feature_count();
    std::vector<std::size_t> current(nf);
    for (std::size_t f = 0; f < nf; ++f) current[f] = f;
    std::vector<std::size_t> eliminated;
    std::vector<std::size_t> subset;
    while (current.size() > 1) {
        std::size_t drop = current.size();
        double best_acc = 0.0;
        for (std::size_t i = 0; i < current.size(); ++i) {
            subset.clear();
            for (std::size_t t = 0; t < current.size(); ++t) {
                if (t != i) subset.push_back(current[t]);
            }
            const double acc = evaluator.evaluate(d, subset);
            if (drop == current.size() || score_greater(acc, best_acc)) {
                drop = i;
                best_acc = acc;
            }
        }
        eliminated.push_back(current[drop]);
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    eliminated.push_back(current.front());
    std::reverse(eliminated.begin(), eliminated.end());
    return Ranking{std::string(method_id(Method::sbs)), std::move(eliminated)};
}

void RankerConfig::validate() const {
    if (bins < 2) throw ConfigError("bins must be at least 2");
    if (mifs_beta < 0.0) throw ConfigError("MIFS beta must be nonnegative");
    if (wrapper_neighbors < 1) throw ConfigError("wrapper k-NN needs k >= 1");
    if (wrapper_folds < 2) throw ConfigError("wrapper needs at least 2 folds");
    forest.validate();
}

std::vector<Ranking> rank_all(const Dataset& d, const RankerConfig& config) {
    config.validate();
    require_complete(d);
    const auto view = discretize(d, config.bins);
    const WrapperEvaluator wrapper{eval::KnnParams{config.wrapper_neighbors}, config.wrapper_folds,
                                   derive_seed(config.seed, kWrapperStream)};

    std::vector<Ranking> out;
    out.reserve(kTableOrder.size());
    for (Method m : kTableOrder) {
        switch (m) {
            case Method::random_forest:
                out.push_back(rank_random_forest(d, config.forest, derive_seed(config.seed, kForestStream)));
                break;
            case Method::sfs: out.push_back(rank_sfs(d, wrapper)); break;
            case Method::sbs: out.push_back(rank_sbs(d, wrapper)); break;
            case Method::mifs: out.push_back(rank_mifs(view, d.labels, config.mifs_beta)); break;
            case Method::chi_squared: out.push_back(rank_chi2(view, d.labels)); break;
            case Method::fscore: out.push_back(rank_fscore(d)); break;
            case Method::jmi: out.push_back(rank_jmi(view, d.labels)); break;
            case Method::nmi: out.push_back(rank_nmi(view, d.labels)); break;
        }
    }
    return out;
}

}  // namespace featrec::rank
