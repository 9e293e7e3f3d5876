#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "featrec/error.hpp"
#include "featrec/pipeline.hpp"
#include "featrec/synthetic.hpp"

namespace fs = std::filesystem;
using namespace featrec;
using pipeline::PipelineConfig;
using io::json;

namespace {

enum ExitCode { kOk = 0, kDiverged = 1, kIo = 2, kContract = 3, kConfig = 4 };

struct DataFlags {
    std::optional<std::string> input;
    std::optional<std::string> label_column;
    std::optional<std::string> schema;
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
    cmd->add_option("--input", f.input, "CSV file with features and a class column");
    cmd->add_option("--label-column", f.label_column, "Name of the class column (default: last)");
    cmd->add_option("--schema", f.schema, "Schema file with index,name,kind lines");
    cmd->add_option("--config", f.config, "JSON config file");
    cmd->add_option("--seed", f.seed, "Master seed");
}

// Defaults, then the config file, then flags.
void overlay(PipelineConfig& c, const DataFlags& f) {
    if (f.config) pipeline::apply_config(c, io::read_json(*f.config));
    if (f.input) c.input = *f.input;
    if (f.label_column) c.label_column = *f.label_column;
    if (f.schema) c.schema = *f.schema;
    if (f.seed) c.seed = *f.seed;
}

json stamp(json doc) {
    doc["metadata"] = pipeline::metadata_block();
    return doc;
}

void emit(const std::optional<std::string>& out_dir, const std::string& name, const json& doc) {
    if (out_dir) {
        io::write_json(fs::path(*out_dir) / name, doc);
        std::cerr << "wrote " << (fs::path(*out_dir) / name).string() << "\n";
    } else {
        std::cout << doc.dump(2) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feature ranking, ensemble recommendation and evaluation"};
    app.require_subcommand(1);

    DataFlags rank_flags;
    std::optional<std::size_t> bins, trees;
    std::optional<double> mifs_beta;
    std::optional<std::string> mi_mode, rank_out;
    auto* rank_cmd = app.add_subcommand("rank", "Rank features with the eight base methods");
    add_data_flags(rank_cmd, rank_flags);
    rank_cmd->add_option("--bins", bins, "Equal-frequency bins for continuous columns");
    rank_cmd->add_option("--mifs-beta", mifs_beta, "Redundancy weight for MIFS");
    rank_cmd->add_option("--trees", trees, "Random forest size");
    rank_cmd->add_option("--mi-mode", mi_mode, "one_vs_rest or pooled");
    rank_cmd->add_option("--out", rank_out, "Output directory")->required();

    std::optional<std::string> rankings_path, fixture, fixture_dir, ensemble_out;
    auto* ens_cmd = app.add_subcommand("ensemble", "Combine rankings into one ordering");
    auto* rankings_opt = ens_cmd->add_option("--rankings", rankings_path, "rankings.json from the rank command");
    auto* fixture_opt = ens_cmd->add_option("--fixture", fixture, "Bundled fixture to replay (table2)");
    ens_cmd->add_option("--fixture-dir", fixture_dir, "Directory holding the fixture files");
    ens_cmd->add_option("--out", ensemble_out, "Output directory (stdout when absent)");
    rankings_opt->excludes(fixture_opt);
    fixture_opt->excludes(rankings_opt);

    DataFlags eval_flags;
    std::optional<std::string> classifier, in_dir, eval_out;
    std::optional<std::size_t> folds, top_k;
    bool save_model = false;
    auto* eval_cmd = app.add_subcommand("evaluate", "Cross-validate a classifier along the ensemble order");
    add_data_flags(eval_cmd, eval_flags);
    eval_cmd->add_option("--classifier", classifier, "nn, svm or knn");
    eval_cmd->add_option("--folds", folds, "Cross-validation folds");
    eval_cmd->add_option("--top-k", top_k, "Also report the accuracy of the first d features");
    eval_cmd->add_option("--in", in_dir, "Directory with rankings.json and ensemble.json")->required();
    eval_cmd->add_option("--out", eval_out, "Output directory")->required();
    eval_cmd->add_flag("--save-model", save_model, "Write model.json trained on the top-k features");

    PlantedConfig planted;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Write a planted four-class dataset");
    synth_cmd->add_option("--rows", planted.rows, "Rows");
    synth_cmd->add_option("--features", planted.features, "Features (at least 4)");
    synth_cmd->add_option("--noise", planted.label_noise, "Label noise probability");
    synth_cmd->add_option("--margin", planted.boundary_margin, "Empty band around the class boundaries");
    synth_cmd->add_option("--seed", synth_seed, "Seed");
    synth_cmd->add_option("--out", synth_out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*rank_cmd) {
            PipelineConfig c;
            overlay(c, rank_flags);
            if (bins) c.ranker.bins = *bins;
            if (mifs_beta) c.ranker.mifs_beta = *mifs_beta;
            if (trees) c.ranker.forest.trees = *trees;
            if (mi_mode) pipeline::apply_config(c, json{{"mi_mode", *mi_mode}});
            c.validate();
            const auto d = pipeline::load_input(c);
            const auto doc = pipeline::run_rank(d, c);
            const fs::path out(*rank_out);
            io::write_json(out / "rankings.json", stamp(io::to_json(doc)));
            for (const auto& r : doc.rankings) {
                json single = io::to_json(r);
                single["spec_version"] = io::kSpecVersion;
                io::write_json(out / ("ranking_" + r.method + ".json"), single);
            }
            std::cerr << "wrote " << (out / "rankings.json").string() << "\n";
        } else if (*ens_cmd) {
            io::RankingsDocument doc;
            if (fixture) {
                if (*fixture != "table2") throw ConfigError("unknown fixture '" + *fixture + "'");
                doc = pipeline::load_table2_fixture(fixture_dir ? fs::path(*fixture_dir) : pipeline::default_data_dir());
            } else if (rankings_path) {
                doc = io::rankings_from_json(io::read_json(*rankings_path));
            } else {
                throw ConfigError("ensemble needs --rankings or --fixture");
            }
            const auto run = pipeline::run_ensemble(doc);
            emit(ensemble_out, "ensemble.json", stamp(run.document));
        } else if (*eval_cmd) {
            const fs::path in(*in_dir);
            const auto rankings = io::rankings_from_json(io::read_json(in / "rankings.json"));
            const auto ens = io::read_json(in / "ensemble.json");
            if (!ens.contains("order")) throw ContractError("ensemble.json has no 'order'");
            const Ranking order = io::ranking_from_json({{"method", "ensemble"}, {"order", ens.at("order")}});

            PipelineConfig c;
            // The ranking run's settings are the starting point, so evaluate
            // can be re-run from the artifacts alone.
            if (rankings.source.contains("config")) pipeline::apply_config(c, rankings.source.at("config"));
            overlay(c, eval_flags);
            if (classifier) c.classifier = *classifier;
            if (folds) c.folds = *folds;
            if (top_k) c.top_k = *top_k;
            c.validate();
            const auto d = pipeline::load_input(c);
            const auto run = pipeline::run_evaluate(d, rankings, order, c, save_model);
            const fs::path out(*eval_out);
            io::write_json(out / "report.json", stamp(run.report));
            io::write_text(out / "curve.csv", run.curve_csv);
            if (run.model) io::write_json(out / "model.json", *run.model);
            std::cerr << "wrote " << (out / "report.json").string() << "\n";
            if (run.report.contains("top_k")) {
                const auto& t = run.report.at("top_k");
                std::cerr << "top-" << t.at("d").get<std::size_t>() << " mean accuracy "
                          << t.at("cv").at("mean_accuracy").get<double>() << "\n";
            }
        } else if (*synth_cmd) {
            const fs::path out(synth_out);
            if (out.has_parent_path()) fs::create_directories(out.parent_path());
            write_csv(make_planted_dataset(planted, synth_seed), out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const ContractError& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return kContract;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kIo;
    } catch (const DivergenceError& e) {
        std::cerr << "training diverged: " << e.what() << "\n";
        return kDiverged;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDiverged;
    }
    return kOk;
}
