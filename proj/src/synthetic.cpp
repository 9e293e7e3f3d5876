#include "featrec/synthetic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "featrec/error.hpp"
#include "featrec/random.hpp"

namespace featrec {

Dataset make_planted_dataset(const PlantedConfig& config, std::uint64_t seed) {
    constexpr int kClasses = 4;
    if (config.features < 4) throw ConfigError("planted dataset needs at least 4 features");
    if (config.rows < kClasses) throw ConfigError("planted dataset needs at least 4 rows");
    if (!(config.label_noise >= 0.0 && config.label_noise <= 1.0)) {
        throw ConfigError("label_noise must lie in [0, 1]");
    }
    if (!(config.boundary_margin >= 0.0 && config.boundary_margin < 0.5)) {
        throw ConfigError("boundary_margin must lie in [0, 0.5)");
    }

    std::vector<std::size_t> quota(kClasses, config.rows / kClasses);
    for (std::size_t c = 0; c < config.rows % kClasses; ++c) ++quota[c];

    Rng rng(seed);
    Matrix x(config.rows, config.features);
    std::vector<long long> labels;
    labels.reserve(config.rows);
    std::vector<double> row(config.features);
    std::size_t filled = 0;
    while (filled < config.rows) {
        for (auto& v : row) v = rng.uniform();
        const double a = row[0] + row[1] - 1.0;
        const double b = row[2] + row[3] - 1.0;
        if (std::abs(a) < config.boundary_margin || std::abs(b) < config.boundary_margin) continue;
        int cls = (a > 0.0 ? 1 : 0) + (b > 0.0 ? 2 : 0);
        if (rng.uniform() < config.label_noise) cls = static_cast<int>(rng.uniform_index(kClasses));
        if (quota[cls] == 0) continue;
        --quota[cls];
        for (std::size_t j = 0; j < config.features; ++j) x(filled, j) = row[j];
        labels.push_back(cls);
        ++filled;
    }

    std::vector<std::string> names;
    for (std::size_t j = 0; j < config.features; ++j) names.push_back("x" + std::to_string(j));
    auto d = make_dataset(x, labels, names);
    d.label_name = "class";
    return d;
}

}  // namespace featrec
