#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "featrec/data.hpp"
#include "featrec/random.hpp"

namespace testutil {

// Random mixed-kind dataset with every class present.
inline featrec::Dataset random_dataset(featrec::Rng& rng, std::size_t rows, std::size_t cols, int classes) {
    featrec::Matrix x(rows, cols);
    std::vector<long long> y(rows);
    for (std::size_t i = 0; i < rows; ++i) y[i] = static_cast<long long>(i < static_cast<std::size_t>(classes) ? i : rng.uniform_index(classes));
    for (std::size_t j = 0; j < cols; ++j) {
        const std::size_t style = rng.uniform_index(4);
        for (std::size_t i = 0; i < rows; ++i) {
            switch (style) {
                case 0: x(i, j) = rng.normal(); break;
                case 1: x(i, j) = static_cast<double>(rng.uniform_index(2)); break;
                case 2: x(i, j) = static_cast<double>(rng.uniform_index(5)); break;
                default: x(i, j) = static_cast<double>(y[i]) + 0.5 * rng.normal(); break;
            }
        }
    }
    return featrec::make_dataset(std::move(x), y);
}

// Column 0 is a copy of the label; the rest are noise.
inline featrec::Dataset label_copy_dataset(std::uint64_t seed, std::size_t rows, std::size_t cols, int classes,
                                           std::size_t copy_at = 0) {
    featrec::Rng rng(seed);
    featrec::Matrix x(rows, cols);
    std::vector<long long> y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        y[i] = static_cast<long long>(i % classes);
        for (std::size_t j = 0; j < cols; ++j) x(i, j) = rng.uniform();
        x(i, copy_at) = static_cast<double>(y[i]);
    }
    return featrec::make_dataset(std::move(x), y);
}

}  // namespace testutil
