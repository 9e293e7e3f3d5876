#pragma once

#include <cstddef>
#include <cstdint>

#include "featrec/data.hpp"

namespace featrec {

struct PlantedConfig {
    std::size_t rows = 500;
    std::size_t features = 20;  // at least 4
    double label_noise = 0.02;  // probability of replacing a label with a uniform draw
    // Rows with |x0 + x1 - 1| or |x2 + x3 - 1| below this are redrawn.
    double boundary_margin = 0.05;
};

// Four balanced classes. Features are uniform on [0,1]; the class is
// (x0 + x1 > 1) + 2 (x2 + x3 > 1), so features 0-3 jointly carry it and the
// rest are independent noise. Rows are drawn until every class has its quota.
Dataset make_planted_dataset(const PlantedConfig& config, std::uint64_t seed);

}  // namespace featrec
