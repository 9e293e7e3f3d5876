#include "featrec/serialize.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "featrec/error.hpp"

namespace featrec::io {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
    if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        if (!keys.count(key)) throw ConfigError("unknown key '" + key + "' in " + what);
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
}

void check_model_header(const json& j, const char* type) {
    if (j.value("format_version", 0) != kModelFormatVersion) {
        throw ContractError("unsupported model format version");
    }
    if (j.value("type", std::string()) != type) {
        throw ContractError(std::string("model document is not of type ") + type);
    }
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<std::size_t> parse_index(std::string_view cell) {
    cell = trim(cell);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
    return v;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.emplace_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

json to_json(const Ranking& r) { return json{{"method", r.method}, {"order", r.order}}; }

Ranking ranking_from_json(const json& j) {
    try {
        Ranking r{j.at("method").get<std::string>(), j.at("order").get<std::vector<std::size_t>>()};
        require_permutation(r.order, r.order.size(), "ranking '" + r.method + "'");
        return r;
    } catch (const json::exception& e) {
        throw ContractError(std::string("malformed ranking: ") + e.what());
    }
}

json to_json(const RankingsDocument& doc) {
    json j;
    j["spec_version"] = kSpecVersion;
    j["source"] = doc.source;
    j["rankings"] = json::array();
    for (const auto& r : doc.rankings) j["rankings"].push_back(to_json(r));
    if (doc.mi_order) j["mi_order"] = to_json(*doc.mi_order);
    return j;
}

RankingsDocument rankings_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rankings") || !j.at("rankings").is_array()) {
        throw ContractError("rankings document lacks a 'rankings' array");
    }
    RankingsDocument doc;
    for (const auto& r : j.at("rankings")) doc.rankings.push_back(ranking_from_json(r));
    if (j.contains("mi_order")) doc.mi_order = ranking_from_json(j.at("mi_order"));
    if (j.contains("source")) doc.source = j.at("source");
    return doc;
}

json to_json(const ensemble::EnsembleResult& result, const ensemble::PositionalTable& table) {
    json j;
    j["spec_version"] = kSpecVersion;
    j["methods"] = table.method_names();
    j["order"] = result.ranking.order;
    // Rows are reported as 1-based ranks.
    json skipped = json::array();
    for (std::size_t r : result.skipped_rows) skipped.push_back(r + 1);
    j["skipped_rows"] = skipped;
    json log = json::array();
    json selections = json::array();
    for (std::size_t k = 0; k < result.log.size(); ++k) {
        const auto& s = result.log[k];
        log.push_back(std::string(ensemble::to_string(s.choice)));
        json entry{{"rank", k + 1}, {"feature", s.feature}, {"choice", ensemble::to_string(s.choice)}};
        entry["row"] = s.choice == ensemble::Choice::leftover ? json(nullptr) : json(s.row + 1);
        selections.push_back(std::move(entry));
    }
    j["tie_break_log"] = log;
    j["selections"] = selections;
    return j;
}

json to_json(const eval::CVReport& report) {
    json notes = json::array();
    for (const auto& n : report.fold_notes) notes.push_back(n);
    return json{{"classifier", report.classifier},
                {"features", report.features},
                {"fold_accuracy", report.fold_accuracy},
                {"fold_size", report.fold_size},
                {"mean_accuracy", report.mean_accuracy},
                {"std_accuracy", report.std_accuracy},
                {"pooled_accuracy", report.pooled_accuracy},
                {"fold_notes", notes}};
}

json to_json(const eval::AccuracyCurve& curve) {
    json points = json::array();
    for (const auto& p : curve.points) {
        points.push_back({{"k", p.k}, {"mean_accuracy", p.mean_accuracy}, {"std_accuracy", p.std_accuracy}});
    }
    return json{{"classifier", curve.classifier}, {"order", curve.order}, {"points", points}};
}

json to_json(const eval::ClassifierSpec& spec) {
    return std::visit(
        overloaded{
            [](const models::MlpParams& p) {
                return json{{"type", "nn"},
                            {"hidden", p.hidden},
                            {"learning_rate", p.adam.learning_rate},
                            {"beta1", p.adam.beta1},
                            {"beta2", p.adam.beta2},
                            {"epsilon", p.adam.epsilon},
                            {"epochs", p.adam.epochs},
                            {"batch_size", p.adam.batch_size}};
            },
            [](const models::SvmParams& p) {
                return json{{"type", "svm"},
                            {"cbox", p.cbox},
                            {"gamma", p.gamma ? json(*p.gamma) : json(nullptr)},
                            {"tol", p.tol},
                            {"max_iterations", p.max_iterations}};
            },
            [](const eval::KnnParams& p) { return json{{"type", "knn"}, {"k", p.k}}; },
            [](const eval::MajorityParams&) { return json{{"type", "majority"}}; },
        },
        spec);
}

eval::ClassifierSpec classifier_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        throw ConfigError("classifier entry needs a string 'type'");
    }
    const auto type = j.at("type").get<std::string>();
    if (type == "nn") {
        reject_unknown_keys(j, {"type", "hidden", "learning_rate", "beta1", "beta2", "epsilon", "epochs", "batch_size"},
                            "nn classifier");
        models::MlpParams p;
        p.hidden = get_or(j, "hidden", p.hidden);
        p.adam.learning_rate = get_or(j, "learning_rate", p.adam.learning_rate);
        p.adam.beta1 = get_or(j, "beta1", p.adam.beta1);
        p.adam.beta2 = get_or(j, "beta2", p.adam.beta2);
        p.adam.epsilon = get_or(j, "epsilon", p.adam.epsilon);
        p.adam.epochs = get_or(j, "epochs", p.adam.epochs);
        p.adam.batch_size = get_or(j, "batch_size", p.adam.batch_size);
        p.adam.validate();
        return p;
    }
    if (type == "svm") {
        reject_unknown_keys(j, {"type", "cbox", "gamma", "tol", "max_iterations"}, "svm classifier");
        models::SvmParams p;
        p.cbox = get_or(j, "cbox", p.cbox);
        if (j.contains("gamma") && !j.at("gamma").is_null()) p.gamma = get_or(j, "gamma", 1.0);
        p.tol = get_or(j, "tol", p.tol);
        p.max_iterations = get_or(j, "max_iterations", p.max_iterations);
        p.validate();
        return p;
    }
    if (type == "knn") {
        reject_unknown_keys(j, {"type", "k"}, "knn classifier");
        eval::KnnParams p;
        p.k = get_or(j, "k", p.k);
        if (p.k < 1) throw ConfigError("knn k must be at least 1");
        return p;
    }
    if (type == "majority") {
        reject_unknown_keys(j, {"type"}, "majority classifier");
        return eval::MajorityParams{};
    }
    throw ConfigError("unknown classifier type '" + type + "' (expected nn, svm or knn)");
}

std::string curve_csv(const eval::AccuracyCurve& curve) {
    std::string out = "k,mean_accuracy,std_accuracy\n";
    for (const auto& p : curve.points) {
        // json::dump gives the same round-trip number formatting as the JSON outputs.
        out += std::to_string(p.k) + "," + json(p.mean_accuracy).dump() + "," + json(p.std_accuracy).dump() + "\n";
    }
    return out;
}

json to_json(const models::MlpModel& model) {
    json layers = json::array();
    for (const auto& l : model.layers) layers.push_back({{"weights", matrix_to_json(l.weights)}, {"bias", l.bias}});
    return json{{"format_version", kModelFormatVersion},
                {"type", "mlp"},
                {"layer_sizes", model.layer_sizes()},
                {"activation", "sigmoid"},
                {"output", "softmax"},
                {"layers", layers}};
}

models::MlpModel mlp_from_json(const json& j) {
    check_model_header(j, "mlp");
    models::MlpModel model;
    for (const auto& l : j.at("layers")) {
        model.layers.push_back({matrix_from_json(l.at("weights")), l.at("bias").get<std::vector<double>>()});
    }
    return model;
}

json to_json(const models::SvmModel& model) {
    json machines = json::array();
    for (const auto& m : model.machines) {
        machines.push_back({{"support_indices", m.support_indices},
                            {"support_vectors", matrix_to_json(m.support_vectors)},
                            {"coef", m.coef},
                            {"rho", m.rho},
                            {"iterations", m.iterations},
                            {"gap", m.gap},
                            {"converged", m.converged}});
    }
    return json{{"format_version", kModelFormatVersion},
                {"type", "svm"},
                {"kernel", "rbf"},
                {"gamma", model.gamma},
                {"cbox", model.cbox},
                {"class_count", model.class_count},
                {"machines", machines}};
}

models::SvmModel svm_from_json(const json& j) {
    check_model_header(j, "svm");
    models::SvmModel model;
    model.gamma = j.at("gamma").get<double>();
    model.cbox = j.at("cbox").get<double>();
    model.class_count = j.at("class_count").get<int>();
    for (const auto& m : j.at("machines")) {
        models::BinaryMachine b;
        b.support_indices = m.at("support_indices").get<std::vector<std::size_t>>();
        b.support_vectors = matrix_from_json(m.at("support_vectors"));
        b.coef = m.at("coef").get<std::vector<double>>();
        b.rho = m.at("rho").get<double>();
        b.iterations = m.at("iterations").get<std::size_t>();
        b.gap = m.at("gap").get<double>();
        b.converged = m.at("converged").get<bool>();
        model.machines.push_back(std::move(b));
    }
    return model;
}

json to_json(const models::ForestModel& model) {
    json trees = json::array();
    for (const auto& t : model.trees) {
        json nodes = json::array();
        for (const auto& n : t.nodes) {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"impurity_decrease", n.impurity_decrease},
                             {"left", n.left},
                             {"right", n.right},
                             {"class_counts", n.class_counts}});
        }
        trees.push_back(std::move(nodes));
    }
    return json{{"format_version", kModelFormatVersion},
                {"type", "forest"},
                {"feature_count", model.feature_count},
                {"class_count", model.class_count},
                {"tree_seeds", model.tree_seeds},
                {"trees", trees}};
}

models::ForestModel forest_from_json(const json& j) {
    check_model_header(j, "forest");
    models::ForestModel model;
    model.feature_count = j.at("feature_count").get<std::size_t>();
    model.class_count = j.at("class_count").get<int>();
    model.tree_seeds = j.at("tree_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& t : j.at("trees")) {
        models::DecisionTree tree;
        for (const auto& n : t) {
            models::TreeNode node;
            node.feature = n.at("feature").get<int>();
            node.threshold = n.at("threshold").get<double>();
            node.impurity_decrease = n.at("impurity_decrease").get<double>();
            node.left = n.at("left").get<int>();
            node.right = n.at("right").get<int>();
            node.class_counts = n.at("class_counts").get<std::vector<double>>();
            tree.nodes.push_back(std::move(node));
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

IndexGrid read_index_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    IndexGrid grid;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        auto cells = split_commas(line);
        std::vector<std::size_t> row;
        bool numeric = true;
        for (const auto& c : cells) {
            const auto v = parse_index(c);
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
        }
        if (!numeric) {
            if (grid.rows.empty() && grid.header.empty()) {
                grid.header = std::move(cells);
                continue;
            }
            throw ContractError(path.string() + ":" + std::to_string(line_no) + ": non-integer cell");
        }
        if (!grid.rows.empty() && row.size() != grid.rows.front().size()) {
            throw ContractError(path.string() + ":" + std::to_string(line_no) + ": ragged row");
        }
        grid.rows.push_back(std::move(row));
    }
    if (grid.rows.empty()) throw ContractError("'" + path.string() + "' holds no rows");
    if (!grid.header.empty() && grid.header.size() != grid.rows.front().size()) {
        throw ContractError("'" + path.string() + "': header width does not match the rows");
    }
    return grid;
}

std::vector<Ranking> read_positional_table(const std::filesystem::path& path) {
    const auto grid = read_index_grid(path);
    const std::size_t cols = grid.rows.front().size();
    std::vector<Ranking> rankings(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        rankings[j].method = grid.header.empty() ? "method_" + std::to_string(j) : grid.header[j];
        for (const auto& row : grid.rows) rankings[j].order.push_back(row[j]);
        require_permutation(rankings[j].order, grid.rows.size(),
                            "'" + path.string() + "' column " + rankings[j].method);
    }
    return rankings;
}

std::vector<std::size_t> read_index_list(const std::filesystem::path& path) {
    const auto grid = read_index_grid(path);
    std::vector<std::size_t> out;
    if (grid.rows.size() == 1) return grid.rows.front();
    if (grid.rows.front().size() != 1) throw ContractError("'" + path.string() + "' is not a single column");
    for (const auto& row : grid.rows) out.push_back(row.front());
    return out;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json without_metadata(json j) {
    if (j.is_object()) j.erase("metadata");
    return j;
}

}  // namespace featrec::io
