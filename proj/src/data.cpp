#include "featrec/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "featrec/error.hpp"

namespace featrec {
namespace {

constexpr std::size_t kBinaryMaxLevels = 2;
constexpr std::size_t kCategoricalMaxLevels = 12;
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

bool is_integer_like(double v) { return std::floor(v) == v && std::abs(v) < 1e15; }

using Record = std::vector<std::string>;

// RFC-4180 records: quoted fields, doubled quotes, CRLF or LF endings.
// Blank lines are skipped.
std::vector<Record> parse_records(std::string_view text) {
    std::vector<Record> records;
    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t record_no = 1;

    auto end_record = [&] {
        if (field_started || !current.empty()) {
            current.push_back(std::move(field));
            records.push_back(std::move(current));
            ++record_no;
        }
        current.clear();
        field.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                current.push_back(std::move(field));
                field.clear();
                field_started = true;
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                break;
            default:
                field.push_back(ch);
                field_started = true;
        }
    }
    if (in_quotes) throw ParseError(record_no, "unterminated quoted field");
    end_record();
    return records;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

ColumnKind infer_numeric_kind(const std::vector<double>& column) {
    std::set<double> distinct;
    bool integer_like = true;
    for (double v : column) {
        if (std::isnan(v)) continue;
        distinct.insert(v);
        integer_like = integer_like && is_integer_like(v);
        if (distinct.size() > kCategoricalMaxLevels) return ColumnKind::continuous;
    }
    if (distinct.size() <= kBinaryMaxLevels) return ColumnKind::binary;
    return integer_like ? ColumnKind::categorical : ColumnKind::continuous;
}

std::size_t distinct_count(const Matrix& values, std::size_t col) {
    std::set<double> distinct;
    for (std::size_t r = 0; r < values.rows(); ++r) {
        const double v = values(r, col);
        if (!std::isnan(v)) distinct.insert(v);
    }
    return distinct.size();
}

// Maps raw integer labels to compact codes ordered by value.
void assign_labels(Dataset& d, const std::vector<std::optional<long long>>& raw) {
    std::set<long long> distinct;
    for (const auto& v : raw) {
        if (v) distinct.insert(*v);
    }
    d.class_values.assign(distinct.begin(), distinct.end());
    d.class_count = static_cast<int>(d.class_values.size());
    d.labels.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!raw[i]) {
            d.labels[i] = kMissingLabel;
            continue;
        }
        const auto it = std::lower_bound(d.class_values.begin(), d.class_values.end(), *raw[i]);
        d.labels[i] = static_cast<int>(it - d.class_values.begin());
    }
}

void compact_classes(Dataset& d) {
    std::vector<std::optional<long long>> raw(d.labels.size());
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        if (d.labels[i] != kMissingLabel) raw[i] = d.class_values[d.labels[i]];
    }
    assign_labels(d, raw);
}

// Chooses which CSV columns feed the features and in what order.
std::vector<std::size_t> resolve_feature_columns(const Record& header, std::size_t label_col,
                                                 const std::optional<Schema>& schema) {
    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != label_col) candidates.push_back(c);
    }
    if (!schema) return candidates;

    std::vector<std::size_t> by_name;
    for (const auto& spec : *schema) {
        const auto it = std::find_if(candidates.begin(), candidates.end(), [&](std::size_t c) {
            return trim(header[c]) == spec.name;
        });
        if (it == candidates.end()) break;
        by_name.push_back(*it);
    }
    if (by_name.size() == schema->size()) return by_name;
    if (candidates.size() == schema->size()) return candidates;
    throw SchemaError("schema lists " + std::to_string(schema->size()) +
                      " features but the file has " + std::to_string(candidates.size()) +
                      " feature columns and the names do not match");
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::binary: return "binary";
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::continuous: return "continuous";
    }
    return "continuous";
}

ColumnKind parse_column_kind(std::string_view text) {
    std::string lower(trim(text));
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "binary") return ColumnKind::binary;
    if (lower == "categorical") return ColumnKind::categorical;
    if (lower == "continuous") return ColumnKind::continuous;
    throw SchemaError("unknown column kind '" + std::string(text) + "'");
}

bool is_missing_marker(std::string_view cell) {
    cell = trim(cell);
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "[Not Available]" ||
           cell == "[Unknown]";
}

bool Dataset::has_missing() const {
    if (std::any_of(values.data().begin(), values.data().end(),
                    [](double v) { return std::isnan(v); })) {
        return true;
    }
    return std::find(labels.begin(), labels.end(), kMissingLabel) != labels.end();
}

std::vector<std::string> Dataset::feature_names() const {
    std::vector<std::string> names;
    names.reserve(columns.size());
    for (const auto& c : columns) names.push_back(c.name);
    return names;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
    Dataset out;
    out.columns = columns;
    out.levels = levels;
    out.label_name = label_name;
    out.class_count = class_count;
    out.class_values = class_values;
    out.values = values.select_rows(rows);
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) out.labels.push_back(labels[r]);
    return out;
}

void Dataset::validate() const {
    if (values.cols() != columns.size()) throw ContractError("column count mismatch");
    if (labels.size() != values.rows()) throw ContractError("label count mismatch");
    std::set<std::string> names;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].index != j) throw ContractError("column indices are not contiguous");
        if (!names.insert(columns[j].name).second) {
            throw ContractError("duplicate column name '" + columns[j].name + "'");
        }
        if (columns[j].kind == ColumnKind::binary && distinct_count(values, j) > kBinaryMaxLevels) {
            throw ContractError("binary column '" + columns[j].name + "' has more than 2 values");
        }
    }
    if (class_count <= 0) throw ContractError("dataset has no classes");
    std::vector<bool> seen(static_cast<std::size_t>(class_count), false);
    for (int y : labels) {
        if (y == kMissingLabel) continue;
        if (y < 0 || y >= class_count) throw ContractError("label out of range");
        seen[static_cast<std::size_t>(y)] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw ContractError("a class has no rows");
    }
}

Dataset parse_csv(std::string_view text, const std::optional<Schema>& schema,
                  const CsvOptions& options) {
    const auto records = parse_records(text);
    if (records.empty()) throw InputError("empty input: no header row");
    if (records.size() == 1) throw InputError("input has a header but no data rows");

    const Record& header = records.front();
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != header.size()) {
            throw ParseError(r + 1, "expected " + std::to_string(header.size()) + " fields, found " +
                                        std::to_string(records[r].size()));
        }
    }
    if (header.size() < 2) throw SchemaError("need at least one feature column and a label column");

    std::size_t label_col = header.size() - 1;
    if (options.label_column) {
        const auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
            return trim(h) == *options.label_column;
        });
        if (it == header.end()) {
            throw SchemaError("label column '" + *options.label_column + "' not found in header");
        }
        label_col = static_cast<std::size_t>(it - header.begin());
    }

    const auto feature_cols = resolve_feature_columns(header, label_col, schema);
    const std::size_t n = records.size() - 1;
    const std::size_t nf = feature_cols.size();

    Dataset d;
    d.label_name = std::string(trim(header[label_col]));
    d.values = Matrix(n, nf, kMissing);
    d.levels.assign(nf, {});
    d.columns.resize(nf);

    for (std::size_t j = 0; j < nf; ++j) {
        const std::size_t c = feature_cols[j];
        bool textual = false;
        for (std::size_t r = 0; r < n && !textual; ++r) {
            const auto& cell = records[r + 1][c];
            textual = !is_missing_marker(cell) && !parse_number(cell);
        }
        if (textual) {
            std::set<std::string> levels;
            for (std::size_t r = 0; r < n; ++r) {
                const auto& cell = records[r + 1][c];
                if (!is_missing_marker(cell)) levels.insert(std::string(trim(cell)));
            }
            d.levels[j].assign(levels.begin(), levels.end());
            for (std::size_t r = 0; r < n; ++r) {
                const auto& cell = records[r + 1][c];
                if (is_missing_marker(cell)) continue;
                const auto it = std::lower_bound(d.levels[j].begin(), d.levels[j].end(), trim(cell));
                d.values(r, j) = static_cast<double>(it - d.levels[j].begin());
            }
        } else {
            for (std::size_t r = 0; r < n; ++r) {
                const auto& cell = records[r + 1][c];
                if (!is_missing_marker(cell)) d.values(r, j) = *parse_number(cell);
            }
        }

        ColumnSpec spec;
        spec.index = j;
        spec.name = schema ? (*schema)[j].name : std::string(trim(header[c]));
        if (schema) {
            spec.kind = (*schema)[j].kind;
        } else if (textual) {
            spec.kind = d.levels[j].size() <= kBinaryMaxLevels ? ColumnKind::binary
                                                               : ColumnKind::categorical;
        } else {
            spec.kind = infer_numeric_kind(d.values.column(j));
        }
        if (spec.kind == ColumnKind::binary && distinct_count(d.values, j) > kBinaryMaxLevels) {
            throw SchemaError("column '" + spec.name + "' is declared binary but has more than 2 values");
        }
        d.columns[j] = std::move(spec);
    }

    std::vector<std::optional<long long>> raw_labels(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& cell = records[r + 1][label_col];
        if (is_missing_marker(cell)) continue;
        const auto v = parse_number(cell);
        if (!v || !is_integer_like(*v)) {
            throw SchemaError("row " + std::to_string(r + 2) + ": label '" + cell +
                              "' is not an integer class value");
        }
        raw_labels[r] = static_cast<long long>(*v);
    }
    assign_labels(d, raw_labels);
    if (d.class_count == 0) throw SchemaError("label column has no values");

    std::set<std::string> names;
    for (const auto& col : d.columns) {
        if (!names.insert(col.name).second) throw SchemaError("duplicate column name '" + col.name + "'");
    }
    return d;
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<Schema>& schema,
                 const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), schema, options);
}

std::string format_csv(const Dataset& d) {
    std::string out;
    for (const auto& col : d.columns) {
        out += quote_if_needed(col.name);
        out += ',';
    }
    out += quote_if_needed(d.label_name);
    out += '\n';
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t j = 0; j < d.feature_count(); ++j) {
            const double v = d.values(r, j);
            if (std::isnan(v)) {
                out += "NA";
            } else if (j < d.levels.size() && !d.levels[j].empty()) {
                out += quote_if_needed(d.levels[j][static_cast<std::size_t>(v)]);
            } else {
                out += format_double(v);
            }
            out += ',';
        }
        const int y = d.labels[r];
        out += y == kMissingLabel ? std::string("NA") : std::to_string(d.class_values[y]);
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << format_csv(d);
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

Schema parse_schema(std::string_view text) {
    Schema schema;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto first = line.find(',');
        const auto last = line.rfind(',');
        if (first == std::string::npos || first == last) {
            throw SchemaError("schema line " + std::to_string(line_no) + ": expected index,name,kind");
        }
        const auto index = parse_number(std::string_view(line).substr(0, first));
        if (!index || !is_integer_like(*index) || *index < 0) {
            throw SchemaError("schema line " + std::to_string(line_no) + ": bad index");
        }
        ColumnSpec spec;
        spec.index = static_cast<std::size_t>(*index);
        spec.name = std::string(trim(std::string_view(line).substr(first + 1, last - first - 1)));
        spec.kind = parse_column_kind(std::string_view(line).substr(last + 1));
        if (spec.index != schema.size()) {
            throw SchemaError("schema line " + std::to_string(line_no) +
                              ": indices must be contiguous from 0");
        }
        schema.push_back(std::move(spec));
    }
    if (schema.empty()) throw SchemaError("schema has no columns");
    std::set<std::string> names;
    for (const auto& s : schema) {
        if (!names.insert(s.name).second) throw SchemaError("duplicate schema name '" + s.name + "'");
    }
    return schema;
}

Schema read_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open schema '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_schema(buffer.str());
}

Dataset make_dataset(Matrix values, std::span<const long long> labels,
                     std::vector<std::string> names) {
    if (labels.size() != values.rows()) throw ContractError("label count does not match row count");
    if (!names.empty() && names.size() != values.cols()) {
        throw ContractError("name count does not match column count");
    }
    Dataset d;
    d.values = std::move(values);
    d.levels.assign(d.values.cols(), {});
    d.columns.resize(d.values.cols());
    for (std::size_t j = 0; j < d.columns.size(); ++j) {
        d.columns[j].index = j;
        d.columns[j].name = names.empty() ? "f" + std::to_string(j) : std::move(names[j]);
        d.columns[j].kind = infer_numeric_kind(d.values.column(j));
    }
    std::vector<std::optional<long long>> raw(labels.begin(), labels.end());
    assign_labels(d, raw);
    return d;
}

Dataset drop_missing(const Dataset& d) {
    std::vector<std::size_t> keep;
    keep.reserve(d.size());
    for (std::size_t r = 0; r < d.size(); ++r) {
        const auto row = d.values.row(r);
        const bool complete = d.labels[r] != kMissingLabel &&
                              std::none_of(row.begin(), row.end(), [](double v) { return std::isnan(v); });
        if (complete) keep.push_back(r);
    }
    if (keep.empty()) throw InputError("every row has a missing value");
    Dataset out = d.select_rows(keep);
    compact_classes(out);
    return out;
}

DiscretizedView discretize(const Dataset& d, std::size_t bins) {
    if (bins < 2) throw ContractError("discretize needs at least 2 bins");
    const std::size_t n = d.size();
    DiscretizedView view;
    view.codes.resize(d.feature_count());
    view.bin_edges.resize(d.feature_count());
    view.cardinalities.resize(d.feature_count());

    for (std::size_t j = 0; j < d.feature_count(); ++j) {
        const auto column = d.values.column(j);
        if (std::any_of(column.begin(), column.end(), [](double v) { return std::isnan(v); })) {
            throw ContractError("discretize requires complete data; call drop_missing first");
        }
        auto sorted = column;
        std::sort(sorted.begin(), sorted.end());
        auto& codes = view.codes[j];
        codes.resize(n);

        if (d.columns[j].kind == ColumnKind::continuous) {
            auto& edges = view.bin_edges[j];
            for (std::size_t k = 1; k < bins; ++k) {
                const std::size_t pos = k * n / bins;
                if (pos >= n) continue;
                const double e = sorted[pos];
                if (e > sorted.front() && (edges.empty() || e > edges.back())) edges.push_back(e);
            }
            for (std::size_t i = 0; i < n; ++i) {
                codes[i] = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), column[i]) -
                                            edges.begin());
            }
            view.cardinalities[j] = static_cast<int>(edges.size() + 1);
        } else {
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            for (std::size_t i = 0; i < n; ++i) {
                codes[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), column[i]) -
                                            sorted.begin());
            }
            view.cardinalities[j] = static_cast<int>(std::max<std::size_t>(sorted.size(), 1));
        }
    }
    return view;
}

Standardizer Standardizer::fit(const Matrix& x) {
    if (x.rows() == 0) throw ContractError("cannot standardize an empty matrix");
    Standardizer s;
    s.mean_.assign(x.cols(), 0.0);
    s.scale_.assign(x.cols(), 0.0);
    const double n = static_cast<double>(x.rows());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double sum = 0.0;
        double lo = x(0, j);
        double hi = x(0, j);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            sum += x(r, j);
            lo = std::min(lo, x(r, j));
            hi = std::max(hi, x(r, j));
        }
        const double mean = sum / n;
        s.mean_[j] = mean;
        if (lo == hi) continue;
        double ss = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double dev = x(r, j) - mean;
            ss += dev * dev;
        }
        s.scale_[j] = std::sqrt(ss / n);
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
    if (x.cols() != mean_.size()) throw ContractError("standardizer width mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            out(r, j) = scale_[j] > 0.0 ? (x(r, j) - mean_[j]) / scale_[j] : 0.0;
        }
    }
    return out;
}

StandardizedDataset standardize(const Dataset& d) {
    StandardizedDataset out{d, Standardizer::fit(d.values)};
    out.data.values = out.transform.apply(d.values);
    std::fill(out.data.levels.begin(), out.data.levels.end(), std::vector<std::string>{});
    return out;
}

}  // namespace featrec
