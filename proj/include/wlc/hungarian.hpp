#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wlc::shallow {

inline constexpr std::ptrdiff_t kUnassigned = -1;

struct AssignmentSolution {
    // row -> column, kUnassigned for surplus rows of a tall matrix
    std::vector<std::ptrdiff_t> row_to_col;
    double total_cost = 0.0;
};

// Kuhn-Munkres with row/column potentials, O(n^3) in n = max(rows, cols).
// Minimises total cost over min(rows, cols) pairs. Rectangular inputs are
// padded to square with the largest cost. `cost` is row-major.
AssignmentSolution hungarian(std::span<const double> cost, std::size_t rows, std::size_t cols);

} // namespace wlc::shallow
