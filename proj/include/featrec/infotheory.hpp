#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "featrec/data.hpp"
#include "featrec/ranking.hpp"

// Plug-in estimators over discrete code columns. All quantities are in bits.
namespace featrec::info {

// Empirical distribution of a code column: mass[x] = count(x) / N.
struct DiscreteDistribution {
    std::vector<std::size_t> counts;
    std::vector<double> mass;
    std::size_t total = 0;

    static DiscreteDistribution from_codes(std::span<const int> codes);
    double entropy() const;
};

// Joint counts of two equally long code columns.
class ContingencyTable {
public:
    ContingencyTable(std::span<const int> x, std::span<const int> y);

    std::size_t rows() const noexcept { return row_totals_.size(); }
    std::size_t cols() const noexcept { return col_totals_.size(); }
    std::size_t total() const noexcept { return total_; }
    std::size_t count(std::size_t i, std::size_t j) const { return counts_[i * cols() + j]; }
    std::size_t row_total(std::size_t i) const { return row_totals_[i]; }
    std::size_t col_total(std::size_t j) const { return col_totals_[j]; }

    double mutual_information() const;
    // Pearson statistic sum (O - E)^2 / E over cells with E > 0.
    double chi_square() const;

private:
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> row_totals_;
    std::vector<std::size_t> col_totals_;
    std::size_t total_ = 0;
};

double entropy(std::span<const int> x);

// Eq. MI(X;Y) = sum p(x,y) log2 p(x,y) / (p(x) p(y)); negative rounding is clamped to 0.
double mutual_information(std::span<const int> x, std::span<const int> y);

// I((F,S); C), the information the pair carries about c.
double joint_mutual_information(std::span<const int> f, std::span<const int> s,
                                std::span<const int> c);

// Symmetric uncertainty 2 I(X;Y) / (H(X) + H(Y)); 0 when both entropies are 0.
double normalized_mutual_information(std::span<const int> x, std::span<const int> y);

// Product code of two columns; distinct pairs get distinct codes.
std::vector<int> pair_codes(std::span<const int> a, std::span<const int> b);

enum class MiRankMode {
    // sum_k p(c_k) I(1[C = c_k]; f)
    one_vs_rest,
    // sum_k p(c_k) I(C; f) = I(C; f)
    pooled,
};

// Class-prior-weighted relevance score of every feature.
std::vector<double> mi_class_scores(const DiscretizedView& view, std::span<const int> labels,
                                    MiRankMode mode = MiRankMode::one_vs_rest);

// Features by descending mi_class_scores, ties to the lower index.
Ranking mi_class_rank(const DiscretizedView& view, std::span<const int> labels,
                      MiRankMode mode = MiRankMode::one_vs_rest);

}  // namespace featrec::info
