#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace featrec {

// A permutation of feature indices; order[k] is the feature ranked k+1.
struct Ranking {
    std::string method;
    std::vector<std::size_t> order;

    std::size_t size() const noexcept { return order.size(); }
    friend bool operator==(const Ranking&, const Ranking&) = default;
};

bool is_permutation_of_range(std::span<const std::size_t> order, std::size_t n);

// Throws ContractError unless `order` is a permutation of 0..n-1.
void require_permutation(std::span<const std::size_t> order, std::size_t n, const std::string& what);

// Relative tolerance under which two scores count as tied.
inline constexpr double kScoreTieTolerance = 1e-12;

bool score_greater(double a, double b);

// Indices sorted by descending score; tied scores keep ascending index order.
std::vector<std::size_t> order_by_score(std::span<const double> scores);

}  // namespace featrec
