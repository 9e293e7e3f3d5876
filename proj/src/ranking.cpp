#include "featrec/ranking.hpp"

#include <algorithm>
#include <cmath>

#include "featrec/error.hpp"

namespace featrec {

bool is_permutation_of_range(std::span<const std::size_t> order, std::size_t n) {
    if (order.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (std::size_t f : order) {
        if (f >= n || seen[f]) return false;
        seen[f] = true;
    }
    return true;
}

void require_permutation(std::span<const std::size_t> order, std::size_t n, const std::string& what) {
    if (!is_permutation_of_range(order, n)) {
        throw ContractError(what + " is not a permutation of 0.." + std::to_string(n == 0 ? 0 : n - 1));
    }
}

bool score_greater(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return a > b + kScoreTieTolerance * scale;
}

std::vector<std::size_t> order_by_score(std::span<const double> scores) {
    // Repeated tolerant argmax: a tolerance comparator is not a strict weak
    // ordering, so std::sort cannot be used here.
    std::vector<std::size_t> order;
    std::vector<bool> taken(scores.size(), false);
    order.reserve(scores.size());
    for (std::size_t step = 0; step < scores.size(); ++step) {
        std::size_t best = scores.size();
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (taken[i]) continue;
            if (best == scores.size() || score_greater(scores[i], scores[best])) best = i;
        }
        taken[best] = true;
        order.push_back(best);
    }
    return order;
}

}  // namespace featrec
