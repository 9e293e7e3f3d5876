#include "featrec/ensemble.hpp"

#include <algorithm>

#include "featrec/error.hpp"

namespace featrec::ensemble {

PositionalTable PositionalTable::from_rankings(std::span<const Ranking> rankings) {
    if (rankings.empty()) throw ContractError("positional table needs at least one ranking");
    PositionalTable t;
    t.features_ = rankings.front().order.size();
    t.methods_ = rankings.size();
    if (t.features_ == 0) throw ContractError("rankings are empty");
    for (std::size_t j = 0; j < rankings.size(); ++j) {
        const auto& r = rankings[j];
        if (r.order.size() != t.features_) {
            throw ContractError("ranking " + std::to_string(j) + " has length " + std::to_string(r.order.size()) +
                                ", expected " + std::to_string(t.features_));
        }
        require_permutation(r.order, t.features_, "ranking " + std::to_string(j));
        t.names_.push_back(r.method);
    }
    t.grid_.resize(t.features_ * t.methods_);
    for (std::size_t i = 0; i < t.features_; ++i) {
        for (std::size_t j = 0; j < t.methods_; ++j) t.grid_[i * t.methods_ + j] = rankings[j].order[i];
    }
    return t;
}

MiOrdering::MiOrdering(std::vector<std::size_t> order) : order_(std::move(order)) {
    require_permutation(order_, order_.size(), "MI ordering");
    position_.resize(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) position_[order_[i]] = i;
}

std::string_view to_string(Choice c) {
    switch (c) {
        case Choice::majority: return "majority";
        case Choice::mi: return "mi";
        case Choice::leftover: return "leftover";
    }
    return "majority";
}

EnsembleState::EnsembleState(std::size_t features) : in_s_(features, false), occ_(features, 0) {
    rank_.reserve(features);
}

const std::vector<std::size_t>& EnsembleState::count_row(std::span<const std::size_t> row) {
    std::fill(occ_.begin(), occ_.end(), 0);
    for (std::size_t f : row) {
        if (!in_s_[f]) ++occ_[f];
    }
    return occ_;
}

void EnsembleState::select(std::size_t f) {
    if (in_s_[f]) throw ContractError("feature " + std::to_string(f) + " selected twice");
    in_s_[f] = true;
    rank_.push_back(f);
}

EnsembleResult ensemble_rank(const PositionalTable& table, const MiOrdering& mi) {
    const std::size_t nf = table.features();
    if (mi.order().size() != nf) throw ContractError("MI ordering does not cover the table's features");

    EnsembleState state(nf);
    EnsembleResult result;
    result.log.reserve(nf);

    for (std::size_t i = 0; i < nf; ++i) {
        const auto row = table.row(i);
        const auto& occ = state.count_row(row);

        std::size_t top = nf;
        std::size_t top_count = 0;
        bool unique = false;
        for (std::size_t f : row) {
            if (occ[f] == 0 || f == top) continue;
            if (occ[f] > top_count) {
                top = f;
                top_count = occ[f];
                unique = true;
            } else if (occ[f] == top_count) {
                unique = false;
            }
        }
        if (top == nf) {
            result.skipped_rows.push_back(i);
            continue;
        }
        if (unique) {
            state.select(top);
            result.log.push_back({top, Choice::majority, i});
            continue;
        }
        std::size_t best = nf;
        for (std::size_t f : row) {
            if (occ[f] == 0) continue;
            if (best == nf || mi.position(f) < mi.position(best)) best = f;
        }
        state.select(best);
        result.log.push_back({best, Choice::mi, i});
    }

    for (std::size_t f : mi.order()) {
        if (!state.selected(f)) {
            state.select(f);
            result.log.push_back({f, Choice::leftover, nf});
        }
    }
    result.ranking = Ranking{"ensemble", state.rank()};
    return result;
}

std::vector<std::size_t> recommend_top(const Ranking& ranking, std::size_t d) {
    if (d < 1 || d > ranking.order.size()) {
        throw ContractError("d must lie in [1, " + std::to_string(ranking.order.size()) + "], got " +
                            std::to_string(d));
    }
    return {ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(d)};
}

}  // namespace featrec::ensemble
