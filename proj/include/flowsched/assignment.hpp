#pragma once

#include <cstdint>
#include <vector>

#include "flowsched/matrix.hpp"

namespace flowsched {

// Minimum-cost perfect matching on a square cost matrix (Hungarian method with
// potentials, O(n^3)). Returns the column matched to each row.
std::vector<int> hungarian(const Matrix<std::int64_t>& cost);

}  // namespace flowsched
