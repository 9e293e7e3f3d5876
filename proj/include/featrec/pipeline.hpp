#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "featrec/data.hpp"
#include "featrec/ensemble.hpp"
#include "featrec/eval.hpp"
#include "featrec/rankers.hpp"
#include "featrec/serialize.hpp"

namespace featrec::pipeline {

using io::json;

struct PipelineConfig {
    std::string input;
    std::optional<std::string> label_column;
    std::string schema;
    std::uint64_t seed = 0;
    rank::RankerConfig ranker;

    std::string classifier = "nn";
    models::MlpParams nn;
    models::SvmParams svm;
    eval::KnnParams knn;
    std::size_t folds = 10;
    std::optional<std::size_t> top_k;
    std::vector<eval::ClassifierSpec> grid;

    eval::ClassifierSpec selected_classifier() const;  // throws ConfigError
    void validate() const;                            // throws ConfigError
};

// Overlays a JSON config object; unknown keys raise ConfigError.
void apply_config(PipelineConfig& config, const json& j);
PipelineConfig load_config(const std::filesystem::path& path);
json to_json(const PipelineConfig& config);

// Reads config.input with the optional schema and drops incomplete rows.
Dataset load_input(const PipelineConfig& config);

// Eight rankings in table order plus the class-relevance (MI) ordering.
io::RankingsDocument run_rank(const Dataset& d, const PipelineConfig& config);

struct EnsembleRun {
    ensemble::PositionalTable table;
    ensemble::EnsembleResult result;
    json document;
};

EnsembleRun run_ensemble(const std::vector<Ranking>& rankings, const Ranking& mi_order);
EnsembleRun run_ensemble(const io::RankingsDocument& doc);  // throws ContractError without mi_order

// Directory holding table2.csv, table3_mi.csv and ccrcc.schema.
std::filesystem::path default_data_dir();

// Published positional table (8 columns) and MI ordering.
io::RankingsDocument load_table2_fixture(const std::filesystem::path& data_dir = default_data_dir());

struct EvaluateRun {
    json report;
    std::string curve_csv;
    std::optional<json> model;  // classifier trained on the top-k features
};

EvaluateRun run_evaluate(const Dataset& d, const io::RankingsDocument& rankings, const Ranking& ensemble_order,
                         const PipelineConfig& config, bool train_model = false);

// {"tool", "version", "generated_at"}; excluded when comparing runs.
json metadata_block();

}  // namespace featrec::pipeline
