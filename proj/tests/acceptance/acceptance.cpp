// Acceptance checks, one line per criterion: PASS, FAIL or SKIP.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "featrec/ensemble.hpp"
#include "featrec/error.hpp"
#include "featrec/eval.hpp"
#include "featrec/infotheory.hpp"
#include "featrec/models/mlp.hpp"
#include "featrec/models/svm.hpp"
#include "featrec/pipeline.hpp"
#include "featrec/random.hpp"
#include "featrec/rankers.hpp"
#include "featrec/serialize.hpp"
#include "featrec/synthetic.hpp"

namespace fs = std::filesystem;
using namespace featrec;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    enum class Status { pass, fail, skip } status;
    std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Status::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Status::fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::Status::skip, std::move(d)}; }

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

std::string sci(double v) {
    std::ostringstream os;
    os.setf(std::ios::scientific);
    os.precision(2);
    os << v;
    return os.str();
}

std::string join(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::vector<std::size_t> iota(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

const std::vector<std::size_t> kProposed{7,  9,  22, 0,  27, 1,  17, 14, 25, 8,  5, 15, 18, 19, 21,
                                         13, 24, 12, 3,  23, 10, 20, 16, 11, 4, 28, 6, 2,  26};

ensemble::EnsembleResult fixture_ensemble() {
    const auto doc = pipeline::load_table2_fixture(FEATREC_DATA_DIR);
    return pipeline::run_ensemble(doc).result;
}

Outcome criterion_oracle() {
    const auto t0 = Clock::now();
    const auto r = fixture_ensemble();
    const double secs = seconds_since(t0);
    if (r.ranking.order != kProposed) return fail("order " + join(r.ranking.order));
    if (r.skipped_rows != std::vector<std::size_t>{22}) return fail("skipped rows differ");
    if (r.log.back().feature != 26 || r.log.back().choice != ensemble::Choice::leftover) {
        return fail("feature 26 was not the leftover append");
    }
    if (secs >= 1.0) return fail("took " + fmt(secs) + " s");
    return pass("order matches, row 23 skipped, 26 appended last, " + fmt(secs) + " s");
}

Outcome criterion_top4() {
    const auto top = ensemble::recommend_top(fixture_ensemble().ranking, 4);
    if (top != std::vector<std::size_t>{7, 9, 22, 0}) return fail("top-4 = " + join(top));
    return pass("top-4 = 7,9,22,0");
}

Outcome criterion_planted() {
    const auto t0 = Clock::now();
    int recovered = 0;
    double nn_sum = 0.0, svm_sum = 0.0, nn_min = 1.0, svm_min = 1.0;
    constexpr int kSeeds = 10;
    for (int s = 0; s < kSeeds; ++s) {
        const auto d = make_planted_dataset(PlantedConfig{}, static_cast<std::uint64_t>(s));
        pipeline::PipelineConfig c;
        c.seed = static_cast<std::uint64_t>(s);
        c.top_k = 4;
        const auto rankings = pipeline::run_rank(d, c);
        const auto ens = pipeline::run_ensemble(rankings);
        const auto top6 = ensemble::recommend_top(ens.result.ranking, 6);
        const std::set<std::size_t> top6_set(top6.begin(), top6.end());
        bool all_four = true;
        for (std::size_t f = 0; f < 4; ++f) all_four = all_four && top6_set.count(f);
        recovered += all_four;

        const auto top4 = ensemble::recommend_top(ens.result.ranking, 4);
        const auto plan = eval::stratified_folds(d.labels, 10, derive_seed(c.seed, 303));
        const auto nn = eval::cross_validate(d, top4, c.nn, plan, derive_seed(c.seed, 404)).mean_accuracy;
        const auto svm = eval::cross_validate(d, top4, c.svm, plan, derive_seed(c.seed, 404)).mean_accuracy;
        nn_sum += nn;
        svm_sum += svm;
        nn_min = std::min(nn_min, nn);
        svm_min = std::min(svm_min, svm);
    }
    const double nn_mean = nn_sum / kSeeds, svm_mean = svm_sum / kSeeds;
    const double secs = seconds_since(t0);
    const std::string detail = "planted in top 6 for " + std::to_string(recovered) + "/10 seeds; NN mean " +
                               fmt(nn_mean) + " (min " + fmt(nn_min) + "), SVM mean " + fmt(svm_mean) +
                               " (min " + fmt(svm_min) + "), " + fmt(secs, 1) + " s";
    if (recovered < 9 || nn_mean < 0.90 || svm_mean < 0.90 || secs >= 300) return fail(detail);
    return pass(detail);
}

Outcome criterion_ccrcc() {
    const char* path = std::getenv("FEATREC_CCRCC_CSV");
    if (!path || !*path) return skip("set FEATREC_CCRCC_CSV to a ccRCC export to run this path");
    pipeline::PipelineConfig c;
    c.input = path;
    c.schema = (fs::path(FEATREC_DATA_DIR) / "ccrcc.schema").string();
    if (const char* label = std::getenv("FEATREC_CCRCC_LABEL"); label && *label) c.label_column = label;
    c.top_k = 4;
    const auto d = pipeline::load_input(c);
    const auto rankings = pipeline::run_rank(d, c);
    const auto ens = pipeline::run_ensemble(rankings);
    std::string detail = std::to_string(d.size()) + " rows; top-4 " +
                         join(ensemble::recommend_top(ens.result.ranking, 4));
    for (const char* name : {"nn", "svm"}) {
        c.classifier = name;
        const auto run = pipeline::run_evaluate(d, rankings, ens.result.ranking, c);
        detail += std::string("; ") + name + " top-4 accuracy " +
                  fmt(run.report.at("top_k").at("cv").at("mean_accuracy").get<double>());
    }
    return pass(detail);
}

Outcome criterion_information() {
    const auto t0 = Clock::now();
    Rng rng(5);
    int bad = 0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t n = 1 + rng.uniform_index(80);
        const std::size_t kx = 1 + rng.uniform_index(6), ky = 1 + rng.uniform_index(6);
        std::vector<int> x(n), y(n);
        const bool independent = t % 10 == 0;
        if (independent) {
            // Full product grid repeated, so the empirical joint factorizes exactly.
            x.clear(), y.clear();
            const std::size_t reps = 1 + rng.uniform_index(3);
            for (std::size_t a = 0; a < kx; ++a) {
                for (std::size_t b = 0; b < ky; ++b) {
                    for (std::size_t r = 0; r < reps; ++r) {
                        x.push_back(static_cast<int>(a));
                        y.push_back(static_cast<int>(b));
                    }
                }
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = static_cast<int>(rng.uniform_index(kx));
                y[i] = static_cast<int>(rng.uniform_index(ky));
            }
        }
        const double mxy = info::mutual_information(x, y), myx = info::mutual_information(y, x);
        bad += std::abs(mxy - myx) > 1e-12;
        bad += mxy < 0.0;
        bad += mxy > std::min(info::entropy(x), info::entropy(y)) + 1e-9;
        if (independent) bad += mxy > 1e-12;
    }
    // Direct cell-by-cell sum for the joint [[2,1],[1,2]].
    const double cells[2][2] = {{2, 1}, {1, 2}};
    double by_hand = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double p = cells[i][j] / 6.0;
            by_hand += p * std::log2(p / (0.5 * 0.5));
        }
    }
    const double mi = info::mutual_information(std::vector<int>{0, 0, 0, 1, 1, 1}, std::vector<int>{0, 0, 1, 0, 1, 1});
    const double secs = seconds_since(t0);
    const std::string detail = "10000 cases, " + std::to_string(bad) + " violations; [[2,1],[1,2]] = " +
                               fmt(mi, 6) + " bits (direct sum " + fmt(by_hand, 6) + "), " + fmt(secs, 2) + " s";
    if (bad || std::abs(mi - 0.0817) > 1e-4 || std::abs(mi - by_hand) > 1e-12 || secs >= 30) return fail(detail);
    return pass(detail);
}

Outcome criterion_permutations() {
    const auto t0 = Clock::now();
    Rng rng(6);
    int bad = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t nf = 1 + rng.uniform_index(30);
        const std::size_t n = 10 + rng.uniform_index(291);
        const int classes = 2 + static_cast<int>(rng.uniform_index(3));
        Matrix x(n, nf);
        std::vector<long long> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = i < static_cast<std::size_t>(classes) ? i : rng.uniform_index(classes);
        for (std::size_t j = 0; j < nf; ++j) {
            const std::size_t style = rng.uniform_index(3);
            for (std::size_t i = 0; i < n; ++i) {
                x(i, j) = style == 0 ? rng.normal()
                        : style == 1 ? static_cast<double>(rng.uniform_index(4))
                                     : static_cast<double>(y[i]) + rng.normal();
            }
        }
        const auto d = make_dataset(std::move(x), y);
        rank::RankerConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(t);
        auto rankings = rank::rank_all(d, cfg);
        for (const auto& r : rankings) bad += !is_permutation_of_range(r.order, nf);
        const auto mi = info::mi_class_rank(discretize(d), d.labels);
        bad += !is_permutation_of_range(mi.order, nf);

        const ensemble::MiOrdering ordering(mi.order);
        const auto a = ensemble::ensemble_rank(ensemble::PositionalTable::from_rankings(rankings), ordering);
        bad += !is_permutation_of_range(a.ranking.order, nf);
        rng.shuffle(rankings);
        const auto b = ensemble::ensemble_rank(ensemble::PositionalTable::from_rankings(rankings), ordering);
        bad += a.ranking.order != b.ranking.order;

        std::vector<Ranking> same(rankings.size(), rankings.front());
        const auto u = ensemble::ensemble_rank(ensemble::PositionalTable::from_rankings(same), ordering);
        bad += u.ranking.order != rankings.front().order;
    }
    const double secs = seconds_since(t0);
    const std::string detail = "200 datasets, " + std::to_string(bad) + " violations, " + fmt(secs, 1) + " s";
    if (bad || secs >= 120) return fail(detail);
    return pass(detail);
}

Outcome criterion_gradients() {
    const auto t0 = Clock::now();
    Rng rng(7);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::vector<std::size_t> sizes{1 + rng.uniform_index(5)};
        for (std::size_t h = 0, depth = 1 + rng.uniform_index(2); h < depth; ++h) sizes.push_back(1 + rng.uniform_index(6));
        sizes.push_back(2 + rng.uniform_index(3));
        auto m = models::MlpModel::initialize(sizes, rng.next());
        for (auto& layer : m.layers) {
            for (auto& b : layer.bias) b = 0.3 * rng.normal();
        }
        const std::size_t batch = 1 + rng.uniform_index(8);
        Matrix x(batch, sizes.front());
        for (auto& v : x.data()) v = rng.normal();
        std::vector<int> y(batch);
        for (auto& v : y) v = static_cast<int>(rng.uniform_index(sizes.back()));
        models::MlpGradients g;
        models::mlp_loss_and_gradients(m, x, y, g);
        const double h = 1e-5;
        auto probe = [&](double& p, double analytic) {
            const double saved = p;
            p = saved + h;
            const double up = models::mlp_loss(m, x, y);
            p = saved - h;
            const double down = models::mlp_loss(m, x, y);
            p = saved;
            const double numeric = (up - down) / (2 * h);
            worst = std::max(worst, std::abs(analytic - numeric) /
                                        std::max({std::abs(analytic), std::abs(numeric), 1e-6}));
        };
        for (std::size_t l = 0; l < m.layers.size(); ++l) {
            for (std::size_t k = 0; k < m.layers[l].weights.data().size(); ++k) {
                probe(m.layers[l].weights.data()[k], g.weights[l].data()[k]);
            }
            for (std::size_t k = 0; k < m.layers[l].bias.size(); ++k) probe(m.layers[l].bias[k], g.bias[l][k]);
        }
    }
    const double secs = seconds_since(t0);
    const std::string detail = "50 networks, max relative error " + sci(worst) + ", " + fmt(secs, 2) + " s";
    if (worst > 1e-4 || secs >= 60) return fail(detail);
    return pass(detail);
}

Outcome criterion_smo() {
    const auto t0 = Clock::now();
    Rng rng(8);
    Matrix x(60, 2);
    std::vector<int> y(60);
    for (std::size_t i = 0; i < 60; ++i) {
        y[i] = i < 30 ? 0 : 1;
        x(i, 0) = rng.normal() * 0.4 + (y[i] ? 2.0 : -2.0);
        x(i, 1) = rng.normal() * 0.4 + (y[i] ? 2.0 : -2.0);
    }
    models::SvmParams p;
    std::vector<models::SmoResult> solver;
    const auto model = models::svm_train(x, y, 2, p, &solver);
    const auto pred = models::svm_predict(model, x);
    const double acc = static_cast<double>(std::count_if(pred.begin(), pred.end(), [&, i = 0](int v) mutable {
                           return v == y[static_cast<std::size_t>(i++)];
                       })) / 60.0;

    // KKT residuals of every binary machine.
    const double gamma = models::default_gamma(x);
    const Matrix gram = models::rbf_gram(x, gamma);
    double worst = 0.0;
    for (std::size_t k = 0; k < solver.size(); ++k) {
        const auto& r = solver[k];
        for (std::size_t i = 0; i < 60; ++i) {
            const int si = y[i] == static_cast<int>(k) ? 1 : -1;
            double f = -r.rho;
            for (std::size_t j = 0; j < 60; ++j) f += r.alpha[j] * (y[j] == static_cast<int>(k) ? 1 : -1) * gram(i, j);
            const double yf = si * f;
            const double v = r.alpha[i] <= 0.0     ? std::max(0.0, 1.0 - yf)
                             : r.alpha[i] >= p.cbox ? std::max(0.0, yf - 1.0)
                                                    : std::abs(yf - 1.0);
            worst = std::max(worst, v);
        }
    }

    const Matrix xor_x(4, 2, {0, 0, 0, 1, 1, 0, 1, 1});
    const std::vector<int> xor_y{0, 1, 1, 0};
    models::SvmParams xp;
    xp.gamma = 1.0;
    const bool xor_ok = models::svm_predict(models::svm_train(xor_x, xor_y, 2, xp), xor_x) == xor_y;
    const double secs = seconds_since(t0);
    const std::string detail = "blobs accuracy " + fmt(acc, 3) + ", max KKT violation " + std::to_string(worst) +
                               ", XOR " + (xor_ok ? "fit" : "missed") + ", " + fmt(secs, 2) + " s";
    if (acc != 1.0 || worst > 1e-3 || !xor_ok || secs >= 30) return fail(detail);
    return pass(detail);
}

Outcome criterion_folds() {
    const auto t0 = Clock::now();
    Rng rng(9);
    int bad = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + rng.uniform_index(500);
        const std::size_t k = 2 + rng.uniform_index(std::min<std::size_t>(n - 1, 20));
        const int classes = 1 + static_cast<int>(rng.uniform_index(5));
        std::vector<int> labels(n);
        for (auto& v : labels) v = static_cast<int>(rng.uniform_index(classes));
        const auto plan = eval::stratified_folds(labels, k, rng.next());
        std::vector<int> seen(n, 0);
        std::size_t lo = n, hi = 0;
        std::vector<std::size_t> clo(classes, n), chi(classes, 0);
        for (const auto& f : plan.folds) {
            lo = std::min(lo, f.size());
            hi = std::max(hi, f.size());
            std::vector<std::size_t> per(classes, 0);
            for (std::size_t r : f) {
                ++seen[r];
                ++per[labels[r]];
            }
            for (int c = 0; c < classes; ++c) {
                clo[c] = std::min(clo[c], per[c]);
                chi[c] = std::max(chi[c], per[c]);
            }
        }
        bad += plan.folds.size() != k;
        bad += std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; });
        bad += hi - lo > 1;
        for (int c = 0; c < classes; ++c) bad += chi[c] - clo[c] > 1;
    }
    std::vector<int> y416(416);
    for (std::size_t i = 0; i < 416; ++i) y416[i] = static_cast<int>(i % 4);
    std::set<std::size_t> sizes;
    for (const auto& f : eval::stratified_folds(y416, 10, 1).folds) sizes.insert(f.size());
    const double secs = seconds_since(t0);
    std::string size_text;
    for (std::size_t s : sizes) size_text += (size_text.empty() ? "" : ",") + std::to_string(s);
    const std::string detail = "1000 plans, " + std::to_string(bad) + " violations; N=416 k=10 sizes {" + size_text +
                               "}, " + fmt(secs, 2) + " s";
    if (bad || sizes != std::set<std::size_t>{41, 42} || secs >= 30) return fail(detail);
    return pass(detail);
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string canonical_json(const fs::path& p) { return io::without_metadata(io::read_json(p)).dump(2); }

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion_determinism() {
    const fs::path root = fs::temp_directory_path() / "featrec_acceptance_determinism";
    fs::remove_all(root);
    const std::string exe = FEATREC_EXE;
    const std::string data = (root / "planted.csv").string();
    if (shell(exe + " synth --rows 300 --features 12 --seed 11 --out '" + data + "'") != 0) {
        return fail("synth command failed");
    }
    for (const char* run : {"a", "b"}) {
        const std::string dir = (root / run).string();
        const std::string quiet = " 2>/dev/null";
        if (shell(exe + " rank --input '" + data + "' --seed 7 --out '" + dir + "'" + quiet) != 0 ||
            shell(exe + " ensemble --rankings '" + dir + "/rankings.json' --out '" + dir + "'" + quiet) != 0 ||
            shell(exe + " evaluate --classifier nn --folds 10 --top-k 4 --in '" + dir + "' --out '" + dir + "'" +
                  quiet) != 0) {
            return fail(std::string("pipeline run ") + run + " failed");
        }
    }
    std::vector<std::string> differing;
    for (const char* file : {"rankings.json", "ensemble.json", "report.json"}) {
        if (canonical_json(root / "a" / file) != canonical_json(root / "b" / file)) differing.push_back(file);
    }
    if (read_text(root / "a" / "curve.csv") != read_text(root / "b" / "curve.csv")) differing.push_back("curve.csv");
    fs::remove_all(root);
    if (!differing.empty()) {
        std::string s;
        for (const auto& f : differing) s += " " + f;
        return fail("differs:" + s);
    }
    return pass("rankings.json, ensemble.json, report.json and curve.csv identical across two runs");
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"fixture ensemble order", criterion_oracle},
        {"fixture top-4 recommendation", criterion_top4},
        {"planted recovery and top-4 accuracy", criterion_planted},
        {"ccRCC reproduction path", criterion_ccrcc},
        {"information-theory properties", criterion_information},
        {"permutation properties", criterion_permutations},
        {"MLP gradient check", criterion_gradients},
        {"SMO correctness", criterion_smo},
        {"fold-plan properties", criterion_folds},
        {"CLI determinism", criterion_determinism},
    };
    std::set<std::size_t> only;
    for (int i = 1; i < argc; ++i) only.insert(static_cast<std::size_t>(std::atoi(argv[i])));

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && !only.count(i + 1)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const char* tag = o.status == Outcome::Status::pass ? "PASS" : o.status == Outcome::Status::fail ? "FAIL" : "SKIP";
        failures += o.status == Outcome::Status::fail;
        std::cout << tag << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
