#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "featrec/matrix.hpp"

namespace featrec {

enum class ColumnKind { binary, categorical, continuous };

std::string_view to_string(ColumnKind kind);
ColumnKind parse_column_kind(std::string_view text);  // throws SchemaError

struct ColumnSpec {
    std::string name;
    std::size_t index = 0;
    ColumnKind kind = ColumnKind::continuous;

    friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

using Schema = std::vector<ColumnSpec>;

inline constexpr int kMissingLabel = -1;

// Feature table plus class labels.
//
// Missing feature cells are NaN and missing labels are kMissingLabel; both can
// only appear before drop_missing(). Labels are compact codes in
// [0, class_count); class_values[k] holds the original integer label of code k.
struct Dataset {
    std::vector<ColumnSpec> columns;
    Matrix values;
    std::vector<int> labels;
    int class_count = 0;
    std::vector<long long> class_values;
    // Per column, the sorted string levels when the column was text-coded in the
    // source file; empty for numeric columns.
    std::vector<std::vector<std::string>> levels;
    std::string label_name = "label";

    std::size_t size() const noexcept { return values.rows(); }
    std::size_t feature_count() const noexcept { return columns.size(); }

    bool has_missing() const;
    std::vector<std::string> feature_names() const;

    // Rows in the given order. Labels keep their codes, so a class may be absent.
    Dataset select_rows(std::span<const std::size_t> rows) const;

    // Throws ContractError when an invariant does not hold.
    void validate() const;
};

struct CsvOptions {
    // Name of the class column; the last column when unset.
    std::optional<std::string> label_column;
};

// Markers read as missing cells: "", "NA", "NaN", "[Not Available]", "[Unknown]".
bool is_missing_marker(std::string_view cell);

// Reads a header-first CSV. Without a schema, column kinds are inferred:
// at most 2 distinct values is binary, at most 12 integer-like values is
// categorical, anything else continuous. Text cells in a feature column are
// coded by their sorted distinct level.
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<Schema>& schema = std::nullopt,
                 const CsvOptions& options = {});

Dataset parse_csv(std::string_view text, const std::optional<Schema>& schema = std::nullopt,
                  const CsvOptions& options = {});

// Writes feature columns then the label column (original class values), with
// round-trip precision for finite doubles. Missing cells become "NA".
void write_csv(const Dataset& d, const std::filesystem::path& path);
std::string format_csv(const Dataset& d);

// Schema files hold one `index,name,kind` line per feature; '#' starts a comment.
Schema read_schema(const std::filesystem::path& path);
Schema parse_schema(std::string_view text);

// Builds a complete dataset from in-memory values, inferring column kinds.
// Labels may use any integer values; they are compacted to codes.
Dataset make_dataset(Matrix values, std::span<const long long> labels,
                     std::vector<std::string> names = {});

Dataset drop_missing(const Dataset& d);

struct DiscretizedView {
    // codes[j][i] is the code of row i in column j.
    std::vector<std::vector<int>> codes;
    // Per column; empty for binary and categorical columns. Row value v gets
    // code = number of edges <= v.
    std::vector<std::vector<double>> bin_edges;
    std::vector<int> cardinalities;

    std::size_t size() const noexcept { return codes.empty() ? 0 : codes.front().size(); }
    std::size_t feature_count() const noexcept { return codes.size(); }
    std::span<const int> column(std::size_t j) const { return codes[j]; }
};

inline constexpr std::size_t kDefaultBins = 8;

// Equal-frequency binning of continuous columns into at most `bins` codes;
// binary and categorical columns are coded by sorted distinct value.
DiscretizedView discretize(const Dataset& d, std::size_t bins = kDefaultBins);

// Column-wise z-scoring with population statistics. Columns whose values are
// all equal map to zero.
class Standardizer {
public:
    static Standardizer fit(const Matrix& x);

    Matrix apply(const Matrix& x) const;

    const std::vector<double>& mean() const noexcept { return mean_; }
    const std::vector<double>& scale() const noexcept { return scale_; }

private:
    std::vector<double> mean_;
    std::vector<double> scale_;  // 0 for constant columns
};

struct StandardizedDataset {
    Dataset data;
    Standardizer transform;
};

StandardizedDataset standardize(const Dataset& d);

}  // namespace featrec
