#include "featrec/models/knn.hpp"

#include <algorithm>
#include <utility>

#include "featrec/error.hpp"

namespace featrec::models {

std::vector<int> knn_predict(const Matrix& train, std::span<const int> labels, std::size_t k,
                             const Matrix& query) {
    if (train.rows() == 0) throw ContractError("k-NN needs a nonempty training set");
    if (labels.size() != train.rows()) throw ContractError("label count does not match row count");
    if (k == 0 || k > train.rows()) throw ContractError("k must lie in [1, training rows]");
    if (query.rows() > 0 && query.cols() != train.cols()) throw ContractError("query width mismatch");

    int classes = 0;
    for (int y : labels) {
        if (y < 0) throw ContractError("label out of range");
        classes = std::max(classes, y + 1);
    }

    std::vector<std::pair<double, std::size_t>> dist(train.rows());
    std::vector<std::size_t> votes(static_cast<std::size_t>(classes));
    std::vector<int> out(query.rows());
    for (std::size_t q = 0; q < query.rows(); ++q) {
        const auto x = query.row(q);
        for (std::size_t i = 0; i < train.rows(); ++i) {
            const auto t = train.row(i);
            double d2 = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double d = x[j] - t[j];
                d2 += d * d;
            }
            dist[i] = {d2, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::fill(votes.begin(), votes.end(), 0);
        for (std::size_t n = 0; n < k; ++n) ++votes[static_cast<std::size_t>(labels[dist[n].second])];
        out[q] = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
    return out;
}

}  // namespace featrec::models
