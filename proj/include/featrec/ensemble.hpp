#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "featrec/ranking.hpp"

namespace featrec::ensemble {

// NF x NT grid; at(i, j) is the feature that method j ranks at position i
// (0-based rows here, rank i + 1).
class PositionalTable {
public:
    // Throws ContractError unless every ranking is a permutation of the same 0..NF-1.
    static PositionalTable from_rankings(std::span<const Ranking> rankings);

    std::size_t features() const noexcept { return features_; }
    std::size_t methods() const noexcept { return methods_; }
    std::size_t at(std::size_t row, std::size_t col) const { return grid_[row * methods_ + col]; }
    std::span<const std::size_t> row(std::size_t i) const { return {grid_.data() + i * methods_, methods_}; }
    const std::vector<std::string>& method_names() const noexcept { return names_; }

private:
    std::size_t features_ = 0;
    std::size_t methods_ = 0;
    std::vector<std::size_t> grid_;
    std::vector<std::string> names_;
};

// Features by descending class relevance; consulted when no single feature
// holds a row majority.
class MiOrdering {
public:
    explicit MiOrdering(std::vector<std::size_t> order);  // throws ContractError

    const std::vector<std::size_t>& order() const noexcept { return order_; }
    std::size_t position(std::size_t feature) const { return position_[feature]; }

private:
    std::vector<std::size_t> order_;
    std::vector<std::size_t> position_;
};

enum class Choice { majority, mi, leftover };

std::string_view to_string(Choice c);

struct Selection {
    std::size_t feature = 0;
    Choice choice = Choice::majority;
    // 0-based table row that produced the pick; NF for leftovers.
    std::size_t row = 0;
};

// Selected set S, remaining set R and per-row occurrence counts.
class EnsembleState {
public:
    explicit EnsembleState(std::size_t features);

    bool selected(std::size_t f) const { return in_s_[f]; }
    const std::vector<std::size_t>& rank() const noexcept { return rank_; }
    std::size_t remaining() const noexcept { return in_s_.size() - rank_.size(); }

    // Occurrences of each not-yet-selected feature in the row; selected features count 0.
    const std::vector<std::size_t>& count_row(std::span<const std::size_t> row);
    void select(std::size_t f);

private:
    std::vector<bool> in_s_;
    std::vector<std::size_t> occ_;
    std::vector<std::size_t> rank_;
};

struct EnsembleResult {
    Ranking ranking;
    std::vector<Selection> log;         // one entry per output rank
    std::vector<std::size_t> skipped_rows;  // 0-based rows whose features were all selected
};

// Walks the table row by row. Among the row's not-yet-selected features, a
// strict unique occurrence maximum is taken; otherwise the candidate that the
// MI ordering ranks highest. A row with no candidates yields nothing and later
// picks move up. Features never picked are appended in MI order.
EnsembleResult ensemble_rank(const PositionalTable& table, const MiOrdering& mi);

// First d features of the ranking; throws ContractError unless 1 <= d <= NF.
std::vector<std::size_t> recommend_top(const Ranking& ranking, std::size_t d);

}  // namespace featrec::ensemble
