#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "featrec/matrix.hpp"

namespace featrec::models {

// Majority vote of the k nearest training rows by Euclidean distance. Equal
// distances prefer the lower training row; tied votes go to the lowest class.
std::vector<int> knn_predict(const Matrix& train, std::span<const int> labels, std::size_t k,
                             const Matrix& query);

}  // namespace featrec::models
