#include "featrec/infotheory.hpp"

#include <algorithm>
#include <cmath>

#include "featrec/error.hpp"

namespace featrec::info {
namespace {

std::size_t code_span(std::span<const int> codes) {
    int hi = -1;
    for (int c : codes) {
        if (c < 0) throw ContractError("discrete codes must be nonnegative");
        hi = std::max(hi, c);
    }
    return static_cast<std::size_t>(hi + 1);
}

void require_same_length(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) {
        throw ContractError("columns differ in length (" + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw ContractError("columns are empty");
}

double plogp_sum(std::span<const std::size_t> counts, std::size_t total) {
    const double n = static_cast<double>(total);
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

DiscreteDistribution DiscreteDistribution::from_codes(std::span<const int> codes) {
    if (codes.empty()) throw ContractError("distribution of an empty column");
    DiscreteDistribution d;
    d.counts.assign(code_span(codes), 0);
    for (int c : codes) ++d.counts[static_cast<std::size_t>(c)];
    d.total = codes.size();
    d.mass.resize(d.counts.size());
    for (std::size_t i = 0; i < d.counts.size(); ++i) {
        d.mass[i] = static_cast<double>(d.counts[i]) / static_cast<double>(d.total);
    }
    return d;
}

double DiscreteDistribution::entropy() const { return plogp_sum(counts, total); }

ContingencyTable::ContingencyTable(std::span<const int> x, std::span<const int> y) {
    require_same_length(x, y);
    const std::size_t nx = code_span(x);
    const std::size_t ny = code_span(y);
    counts_.assign(nx * ny, 0);
    row_totals_.assign(nx, 0);
    col_totals_.assign(ny, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto a = static_cast<std::size_t>(x[i]);
        const auto b = static_cast<std::size_t>(y[i]);
        ++counts_[a * ny + b];
        ++row_totals_[a];
        ++col_totals_[b];
    }
    total_ = x.size();
}

double ContingencyTable::mutual_information() const {
    const double n = static_cast<double>(total_);
    double mi = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t j = 0; j < cols(); ++j) {
            const std::size_t c = count(i, j);
            if (c == 0) continue;
            const double joint = static_cast<double>(c);
            const double expected = static_cast<double>(row_total(i)) * static_cast<double>(col_total(j));
            mi += (joint / n) * std::log2(joint * n / expected);
        }
    }
    return std::max(mi, 0.0);
}

double ContingencyTable::chi_square() const {
    const double n = static_cast<double>(total_);
    double stat = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t j = 0; j < cols(); ++j) {
            const double expected = static_cast<double>(row_total(i)) * static_cast<double>(col_total(j)) / n;
            if (expected <= 0.0) continue;
            const double diff = static_cast<double>(count(i, j)) - expected;
            stat += diff * diff / expected;
        }
    }
    return stat;
}

double entropy(std::span<const int> x) { return DiscreteDistribution::from_codes(x).entropy(); }

double mutual_information(std::span<const int> x, std::span<const int> y) {
    return ContingencyTable(x, y).mutual_information();
}

std::vector<int> pair_codes(std::span<const int> a, std::span<const int> b) {
    require_same_length(a, b);
    const auto width = static_cast<int>(code_span(b));
    code_span(a);
    std::vector<int> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * width + b[i];
    return out;
}

double joint_mutual_information(std::span<const int> f, std::span<const int> s,
                                std::span<const int> c) {
    require_same_length(f, s);
    require_same_length(f, c);
    const auto joint = pair_codes(f, s);
    return mutual_information(joint, c);
}

double normalized_mutual_information(std::span<const int> x, std::span<const int> y) {
    const ContingencyTable table(x, y);
    std::vector<std::size_t> rows(table.rows());
    std::vector<std::size_t> cols(table.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = table.row_total(i);
    for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = table.col_total(j);
    const double denom = plogp_sum(rows, table.total()) + plogp_sum(cols, table.total());
    if (denom <= 0.0) return 0.0;
    return std::clamp(2.0 * table.mutual_information() / denom, 0.0, 1.0);
}

std::vector<double> mi_class_scores(const DiscretizedView& view, std::span<const int> labels,
                                    MiRankMode mode) {
    if (labels.size() != view.size()) throw ContractError("label count does not match view rows");
    const auto classes = DiscreteDistribution::from_codes(labels);
    std::vector<double> scores(view.feature_count(), 0.0);

    if (mode == MiRankMode::pooled) {
        for (std::size_t f = 0; f < view.feature_count(); ++f) {
            scores[f] = mutual_information(view.column(f), labels);
        }
        return scores;
    }

    std::vector<int> indicator(labels.size());
    for (std::size_t k = 0; k < classes.counts.size(); ++k) {
        if (classes.counts[k] == 0) continue;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            indicator[i] = labels[i] == static_cast<int>(k) ? 1 : 0;
        }
        for (std::size_t f = 0; f < view.feature_count(); ++f) {
            scores[f] += classes.mass[k] * mutual_information(indicator, view.column(f));
        }
    }
    return scores;
}

Ranking mi_class_rank(const DiscretizedView& view, std::span<const int> labels, MiRankMode mode) {
    const auto scores = mi_class_scores(view, labels, mode);
    return Ranking{"mi", order_by_score(scores)};
}

}  // namespace featrec::info
