#include "featrec/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <set>
#include <sstream>

#include "featrec/error.hpp"
#include "featrec/infotheory.hpp"
#include "featrec/random.hpp"

#ifndef FEATREC_DATA_DIR
#define FEATREC_DATA_DIR "data"
#endif

#ifndef FEATREC_VERSION
#define FEATREC_VERSION "0.0.0"
#endif

namespace featrec::pipeline {
namespace {

constexpr std::uint64_t kFoldStream = 303;
constexpr std::uint64_t kModelStream = 404;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& what) {
    if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + what);
    }
}

template <typename T>
void read_into(const json& j, const char* key, T& target) {
    if (!j.contains(key)) return;
    try {
        target = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

json with_type(json j, const char* type) {
    j["type"] = type;
    return j;
}

info::MiRankMode parse_mi_mode(const std::string& s) {
    if (s == "one_vs_rest") return info::MiRankMode::one_vs_rest;
    if (s == "pooled") return info::MiRankMode::pooled;
    throw ConfigError("mi_mode must be 'one_vs_rest' or 'pooled'");
}

std::string mi_mode_name(info::MiRankMode m) {
    return m == info::MiRankMode::pooled ? "pooled" : "one_vs_rest";
}

}  // namespace

eval::ClassifierSpec PipelineConfig::selected_classifier() const {
    if (classifier == "nn") return nn;
    if (classifier == "svm") return svm;
    if (classifier == "knn") return knn;
    throw ConfigError("unknown classifier '" + classifier + "' (expected nn, svm or knn)");
}

void PipelineConfig::validate() const {
    ranker.validate();
    selected_classifier();
    nn.adam.validate();
    svm.validate();
    if (knn.k < 1) throw ConfigError("knn k must be at least 1");
    if (folds < 2) throw ConfigError("folds must be at least 2");
    if (top_k && *top_k < 1) throw ConfigError("top_k must be at least 1");
}

void apply_config(PipelineConfig& c, const json& j) {
    reject_unknown(j,
                   {"input", "label_column", "schema", "seed", "bins", "mifs_beta", "mi_mode", "forest", "wrapper",
                    "classifier", "nn", "svm", "knn", "folds", "top_k", "grid"},
                   "config");
    read_into(j, "input", c.input);
    if (j.contains("label_column")) {
        if (j.at("label_column").is_null()) c.label_column.reset();
        else c.label_column = j.at("label_column").get<std::string>();
    }
    read_into(j, "schema", c.schema);
    read_into(j, "seed", c.seed);
    read_into(j, "bins", c.ranker.bins);
    read_into(j, "mifs_beta", c.ranker.mifs_beta);
    if (j.contains("mi_mode")) c.ranker.mi_mode = parse_mi_mode(j.at("mi_mode").get<std::string>());
    if (j.contains("forest")) {
        const auto& f = j.at("forest");
        reject_unknown(f, {"trees", "max_depth", "min_samples_split", "max_features"}, "forest");
        read_into(f, "trees", c.ranker.forest.trees);
        read_into(f, "max_depth", c.ranker.forest.max_depth);
        read_into(f, "min_samples_split", c.ranker.forest.min_samples_split);
        read_into(f, "max_features", c.ranker.forest.max_features);
    }
    if (j.contains("wrapper")) {
        const auto& w = j.at("wrapper");
        reject_unknown(w, {"neighbors", "folds"}, "wrapper");
        read_into(w, "neighbors", c.ranker.wrapper_neighbors);
        read_into(w, "folds", c.ranker.wrapper_folds);
    }
    read_into(j, "classifier", c.classifier);
    if (j.contains("nn")) c.nn = std::get<models::MlpParams>(io::classifier_from_json(with_type(j.at("nn"), "nn")));
    if (j.contains("svm")) c.svm = std::get<models::SvmParams>(io::classifier_from_json(with_type(j.at("svm"), "svm")));
    if (j.contains("knn")) c.knn = std::get<eval::KnnParams>(io::classifier_from_json(with_type(j.at("knn"), "knn")));
    read_into(j, "folds", c.folds);
    if (j.contains("top_k")) {
        if (j.at("top_k").is_null()) c.top_k.reset();
        else c.top_k = j.at("top_k").get<std::size_t>();
    }
    if (j.contains("grid")) {
        if (!j.at("grid").is_array()) throw ConfigError("grid must be an array of classifier objects");
        c.grid.clear();
        for (const auto& g : j.at("grid")) c.grid.push_back(io::classifier_from_json(g));
    }
}

PipelineConfig load_config(const std::filesystem::path& path) {
    PipelineConfig c;
    try {
        apply_config(c, io::read_json(path));
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    return c;
}

json to_json(const PipelineConfig& c) {
    json j;
    j["input"] = c.input;
    j["label_column"] = c.label_column ? json(*c.label_column) : json(nullptr);
    j["schema"] = c.schema;
    j["seed"] = c.seed;
    j["bins"] = c.ranker.bins;
    j["mifs_beta"] = c.ranker.mifs_beta;
    j["mi_mode"] = mi_mode_name(c.ranker.mi_mode);
    j["forest"] = {{"trees", c.ranker.forest.trees},
                   {"max_depth", c.ranker.forest.max_depth},
                   {"min_samples_split", c.ranker.forest.min_samples_split},
                   {"max_features", c.ranker.forest.max_features}};
    j["wrapper"] = {{"neighbors", c.ranker.wrapper_neighbors}, {"folds", c.ranker.wrapper_folds}};
    j["classifier"] = c.classifier;
    j["nn"] = io::to_json(eval::ClassifierSpec(c.nn));
    j["svm"] = io::to_json(eval::ClassifierSpec(c.svm));
    j["knn"] = io::to_json(eval::ClassifierSpec(c.knn));
    j["folds"] = c.folds;
    j["top_k"] = c.top_k ? json(*c.top_k) : json(nullptr);
    j["grid"] = json::array();
    for (const auto& g : c.grid) j["grid"].push_back(io::to_json(g));
    return j;
}

Dataset load_input(const PipelineConfig& config) {
    if (config.input.empty()) throw ConfigError("no input file given");
    std::optional<Schema> schema;
    if (!config.schema.empty()) schema = read_schema(config.schema);
    CsvOptions options;
    options.label_column = config.label_column;
    auto d = drop_missing(load_csv(config.input, schema, options));
    d.validate();
    return d;
}

io::RankingsDocument run_rank(const Dataset& d, const PipelineConfig& config) {
    config.validate();
    auto ranker = config.ranker;
    ranker.seed = config.seed;
    io::RankingsDocument doc;
    doc.rankings = rank::rank_all(d, ranker);
    const auto view = discretize(d, ranker.bins);
    doc.mi_order = info::mi_class_rank(view, d.labels, ranker.mi_mode);
    doc.source = {{"input", config.input},
                  {"label_column", config.label_column ? json(*config.label_column) : json(nullptr)},
                  {"schema", config.schema},
                  {"rows", d.size()},
                  {"features", d.feature_names()},
                  {"class_values", d.class_values},
                  {"config", to_json(config)}};
    return doc;
}

EnsembleRun run_ensemble(const std::vector<Ranking>& rankings, const Ranking& mi_order) {
    auto table = ensemble::PositionalTable::from_rankings(rankings);
    if (mi_order.order.size() != table.features()) {
        throw ContractError("MI ordering length does not match the rankings");
    }
    auto result = ensemble::ensemble_rank(table, ensemble::MiOrdering(mi_order.order));
    auto document = io::to_json(result, table);
    document["mi_order"] = mi_order.order;
    return {std::move(table), std::move(result), std::move(document)};
}

EnsembleRun run_ensemble(const io::RankingsDocument& doc) {
    if (!doc.mi_order) throw ContractError("rankings document has no mi_order");
    return run_ensemble(doc.rankings, *doc.mi_order);
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("FEATREC_DATA_DIR"); env && *env) return env;
    return FEATREC_DATA_DIR;
}

io::RankingsDocument load_table2_fixture(const std::filesystem::path& data_dir) {
    io::RankingsDocument doc;
    doc.rankings = io::read_positional_table(data_dir / "table2.csv");
    doc.mi_order = Ranking{"mi", io::read_index_list(data_dir / "table3_mi.csv")};
    doc.source = {{"fixture", "table2"}};
    return doc;
}

EvaluateRun run_evaluate(const Dataset& d, const io::RankingsDocument& rankings, const Ranking& ensemble_order,
                         const PipelineConfig& config, bool train_model) {
    config.validate();
    require_permutation(ensemble_order.order, d.feature_count(), "ensemble order");
    const std::size_t folds = std::min(config.folds, d.size());
    const auto plan = eval::stratified_folds(d.labels, folds, derive_seed(config.seed, kFoldStream));
    const std::uint64_t model_seed = derive_seed(config.seed, kModelStream);

    const std::size_t top_k = config.top_k.value_or(d.feature_count());
    if (top_k > d.feature_count()) throw ConfigError("top_k exceeds the feature count");
    const auto top_features = ensemble::recommend_top(ensemble_order, top_k);

    eval::ClassifierSpec spec = config.selected_classifier();
    json report;
    report["spec_version"] = io::kSpecVersion;
    report["config"] = to_json(config);
    report["dataset"] = {{"rows", d.size()},
                         {"features", d.feature_names()},
                         {"class_count", d.class_count},
                         {"class_values", d.class_values}};
    report["fold_plan"] = {{"k", plan.k}, {"stratified", true}, {"sizes", json::array()}};
    for (const auto& f : plan.folds) report["fold_plan"]["sizes"].push_back(f.size());

    json per_method = json::array();
    for (const auto& r : rankings.rankings) per_method.push_back(io::to_json(r));
    report["rankings"] = per_method;
    if (rankings.mi_order) report["mi_order"] = rankings.mi_order->order;
    report["ensemble_order"] = ensemble_order.order;

    if (!config.grid.empty()) {
        const auto grid = eval::grid_search(d, top_features, config.grid, plan, model_seed);
        json board = json::array();
        for (std::size_t i = 0; i < grid.grid.size(); ++i) {
            board.push_back({{"config", io::to_json(grid.grid[i])}, {"cv", io::to_json(grid.leaderboard[i])}});
        }
        report["grid"] = {{"best_index", grid.best_index}, {"leaderboard", board}};
        spec = grid.best();
    }
    report["classifier"] = io::to_json(spec);

    const auto curve = eval::accuracy_curve(d, ensemble_order, spec, plan, model_seed);
    report["curve"] = io::to_json(curve);
    const auto top_report = eval::cross_validate(d, top_features, spec, plan, model_seed);
    report["top_k"] = {{"d", top_k}, {"features", top_features}, {"cv", io::to_json(top_report)}};

    EvaluateRun run{std::move(report), io::curve_csv(curve), std::nullopt};
    if (train_model) {
        const auto scaler = Standardizer::fit(d.values.select_columns(top_features));
        const Matrix x = scaler.apply(d.values.select_columns(top_features));
        json model;
        if (const auto* p = std::get_if<models::MlpParams>(&spec)) {
            auto params = *p;
            params.adam.seed = model_seed;
            model = io::to_json(models::mlp_train(x, d.labels, d.class_count, params));
        } else if (const auto* s = std::get_if<models::SvmParams>(&spec)) {
            model = io::to_json(models::svm_train(x, d.labels, d.class_count, *s));
        } else {
            model = {{"format_version", io::kModelFormatVersion}, {"type", "knn"}, {"k", std::get<eval::KnnParams>(spec).k}};
        }
        model["features"] = top_features;
        model["standardizer"] = {{"mean", scaler.mean()}, {"scale", scaler.scale()}};
        run.model = std::move(model);
    }
    return run;
}

json metadata_block() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ts;
    ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return {{"tool", "featrec"}, {"version", FEATREC_VERSION}, {"generated_at", ts.str()}};
}

}  // namespace featrec::pipeline
