#include "wlc/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wlc/error.hpp"

namespace wlc::shallow {

AssignmentSolution hungarian(std::span<const double> cost, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw DataError("hungarian: empty cost matrix");
    if (cost.size() != rows * cols) throw DataError("hungarian: cost size does not match rows x cols");
    double pad = cost[0];
    for (double c : cost) {
        if (!std::isfinite(c)) throw DataError("hungarian: non-finite cost");
        pad = std::max(pad, c);
    }

    const std::size_t n = std::max(rows, cols);
    auto at = [&](std::size_t i, std::size_t j) { // 1-based, padded
        return (i <= rows && j <= cols) ? cost[(i - 1) * cols + (j - 1)] : pad;
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0); // column -> row, 0 = free
    std::vector<std::size_t> way(n + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double reduced = at(i0, j) - u[i0] - v[j];
                if (reduced < minv[j]) {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        // augment along the alternating path
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    AssignmentSolution sol;
    sol.row_to_col.assign(rows, kUnassigned);
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = match[j];
        if (i >= 1 && i <= rows && j <= cols) {
            sol.row_to_col[i - 1] = static_cast<std::ptrdiff_t>(j - 1);
            sol.total_cost += cost[(i - 1) * cols + (j - 1)];
        }
    }
    return sol;
}

} // namespace wlc::shallow
