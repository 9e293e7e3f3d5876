#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "featrec/error.hpp"
#include "featrec/infotheory.hpp"
#include "featrec/pipeline.hpp"
#include "featrec/synthetic.hpp"

namespace py = pybind11;
using namespace featrec;
using io::json;

namespace {

// Documents cross the boundary as JSON text; the package decodes them.
std::string dump(const json& j) { return j.dump(); }

Dataset to_dataset(const std::vector<std::vector<double>>& x, const std::vector<long long>& y) {
    if (x.size() != y.size()) throw ContractError("X and y differ in length");
    if (x.empty()) throw InputError("empty dataset");
    Matrix m(x.size(), x.front().size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != m.cols()) throw ContractError("ragged X");
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = x[i][j];
    }
    return make_dataset(std::move(m), y);
}

pipeline::PipelineConfig config_from(const std::string& config_json) {
    pipeline::PipelineConfig c;
    if (!config_json.empty()) pipeline::apply_config(c, json::parse(config_json));
    return c;
}

std::vector<Ranking> rankings_from(const std::vector<std::vector<std::size_t>>& columns) {
    std::vector<Ranking> out;
    for (std::size_t j = 0; j < columns.size(); ++j) out.push_back({"method_" + std::to_string(j), columns[j]});
    return out;
}

}  // namespace

PYBIND11_MODULE(_featrec, m) {
    m.doc() = "Feature ranking and ensemble recommendation";

    auto base = py::register_exception<Error>(m, "FeatrecError");
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<ContractError>(m, "ContractError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

    m.def("entropy", [](const std::vector<int>& x) { return info::entropy(x); }, py::arg("codes"));
    m.def("mutual_information", [](const std::vector<int>& x, const std::vector<int>& y) {
        return info::mutual_information(x, y);
    }, py::arg("x"), py::arg("y"));
    m.def("normalized_mutual_information", [](const std::vector<int>& x, const std::vector<int>& y) {
        return info::normalized_mutual_information(x, y);
    }, py::arg("x"), py::arg("y"));

    m.def("ensemble_rank", [](const std::vector<std::vector<std::size_t>>& columns,
                              const std::vector<std::size_t>& mi_order) {
        return dump(pipeline::run_ensemble(rankings_from(columns), Ranking{"mi", mi_order}).document);
    }, py::arg("rankings"), py::arg("mi_order"));

    m.def("table2_fixture", [](const std::string& data_dir) {
        const auto doc = pipeline::load_table2_fixture(data_dir.empty() ? pipeline::default_data_dir()
                                                                       : std::filesystem::path(data_dir));
        return dump(io::to_json(doc));
    }, py::arg("data_dir") = "");

    m.def("rank", [](const std::vector<std::vector<double>>& x, const std::vector<long long>& y,
                     const std::string& config_json) {
        const auto c = config_from(config_json);
        return dump(io::to_json(pipeline::run_rank(to_dataset(x, y), c)));
    }, py::arg("X"), py::arg("y"), py::arg("config") = "");

    m.def("evaluate", [](const std::vector<std::vector<double>>& x, const std::vector<long long>& y,
                         const std::string& rankings_json, const std::vector<std::size_t>& order,
                         const std::string& config_json) {
        const auto c = config_from(config_json);
        const auto rankings = io::rankings_from_json(json::parse(rankings_json));
        auto run = pipeline::run_evaluate(to_dataset(x, y), rankings, Ranking{"ensemble", order}, c);
        return py::make_tuple(dump(run.report), run.curve_csv);
    }, py::arg("X"), py::arg("y"), py::arg("rankings"), py::arg("order"), py::arg("config") = "");

    m.def("stratified_folds", [](const std::vector<int>& labels, std::size_t k, std::uint64_t seed) {
        return eval::stratified_folds(labels, k, seed).folds;
    }, py::arg("labels"), py::arg("k"), py::arg("seed") = 0);

    m.def("make_planted_dataset", [](std::size_t rows, std::size_t features, std::uint64_t seed, double noise,
                                     double margin) {
        const auto d = make_planted_dataset({rows, features, noise, margin}, seed);
        std::vector<std::vector<double>> x(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            const auto r = d.values.row(i);
            x[i].assign(r.begin(), r.end());
        }
        return py::make_tuple(x, d.labels);
    }, py::arg("rows") = 500, py::arg("features") = 20, py::arg("seed") = 0, py::arg("noise") = 0.02,
       py::arg("margin") = 0.05);
}
