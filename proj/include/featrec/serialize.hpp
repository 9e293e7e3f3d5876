#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "featrec/ensemble.hpp"
#include "featrec/eval.hpp"
#include "featrec/models/forest.hpp"
#include "featrec/models/mlp.hpp"
#include "featrec/models/svm.hpp"
#include "featrec/ranking.hpp"

namespace featrec::io {

using nlohmann::json;

// Version string written into every output document under "spec_version".
inline constexpr const char* kSpecVersion = "1.0";
inline constexpr int kModelFormatVersion = 1;

json to_json(const Ranking& r);
Ranking ranking_from_json(const json& j);  // throws ContractError on bad shape

struct RankingsDocument {
    std::vector<Ranking> rankings;
    std::optional<Ranking> mi_order;
    json source = json::object();  // input path, label column, schema, config
};

json to_json(const RankingsDocument& doc);
RankingsDocument rankings_from_json(const json& j);

json to_json(const ensemble::EnsembleResult& result, const ensemble::PositionalTable& table);

json to_json(const eval::CVReport& report);
json to_json(const eval::AccuracyCurve& curve);
json to_json(const eval::ClassifierSpec& spec);
eval::ClassifierSpec classifier_from_json(const json& j);  // throws ConfigError

// `k,mean_accuracy,std_accuracy` rows with a header.
std::string curve_csv(const eval::AccuracyCurve& curve);

json to_json(const models::MlpModel& model);
models::MlpModel mlp_from_json(const json& j);
json to_json(const models::SvmModel& model);
models::SvmModel svm_from_json(const json& j);
json to_json(const models::ForestModel& model);
models::ForestModel forest_from_json(const json& j);

// Integer grid files: comma-separated rows, an optional non-numeric header row,
// '#' comments. Returns the header cells (empty when absent) and the rows.
struct IndexGrid {
    std::vector<std::string> header;
    std::vector<std::vector<std::size_t>> rows;
};
IndexGrid read_index_grid(const std::filesystem::path& path);

// Columns of a positional-table file as rankings named by the header.
std::vector<Ranking> read_positional_table(const std::filesystem::path& path);

// A one-column (or one-row) file of feature indices.
std::vector<std::size_t> read_index_list(const std::filesystem::path& path);

json read_json(const std::filesystem::path& path);  // throws InputError
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);

// Drops the "metadata" block, for comparing runs.
json without_metadata(json j);

}  // namespace featrec::io
