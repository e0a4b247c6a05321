#pragma once

#include "stoptree/data.hpp"
#include "stoptree/rng.hpp"
#include "stoptree/split.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

namespace testutil {

/// Exhaustive reference implementation of the best-split search: for every
/// covariate and every admissible rank, recompute the two group sums of
/// squares directly from their definitions and take the argmax. O(n^2 d),
/// independent of the scan-based production path.
struct BruteSplit {
    std::size_t j = 0;
    std::size_t r = 0;
    double u_scaled = 0.0;
    double improvement = 0.0;
};

inline std::optional<BruteSplit> brute_force_best_split(const stoptree::NodeData& node,
                                                        std::size_t min_leaf) {
    const std::size_t n = node.n();
    if (n < 2 * min_leaf) {
        return std::nullopt;
    }
    double mean = 0.0;
    for (double v : node.y) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double s_total = 0.0;
    for (double v : node.y) {
        s_total += (v - mean) * (v - mean);
    }
    if (!(s_total > 0.0)) {
        return std::nullopt;
    }

    std::optional<BruteSplit> best;
    std::vector<std::size_t> order(n);
    std::vector<double> sorted_y(n);
    for (std::size_t j = 0; j < node.d; ++j) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double xa = node.covariate(a, j);
            const double xb = node.covariate(b, j);
            return xa < xb || (xa == xb && a < b);
        });
        for (std::size_t i = 0; i < n; ++i) {
            sorted_y[i] = node.y[order[i]];
        }
        for (std::size_t r = min_leaf; r + min_leaf <= n; ++r) {
            if (r > n - 1) {
                break;
            }
            if (node.covariate(order[r - 1], j) == node.covariate(order[r], j)) {
                continue;
            }
            const stoptree::SSums s = stoptree::s_sums(sorted_y, r);
            const double improvement = s.s_total - (s.s_le + s.s_gt);
            // Distinct covariates can induce the same row partition, which
            // ties the improvement mathematically but not bitwise across
            // computation routes. Near-ties therefore resolve toward the
            // smaller (j, r) with the same tolerance the scan uses.
            if (!best ||
                improvement > best->improvement * (1.0 + stoptree::kSplitTieRelTol) + 1e-300) {
                best = BruteSplit{j, r, 0.0, improvement};
            }
        }
    }
    if (best) {
        best->u_scaled = best->improvement / (s_total / static_cast<double>(n));
    }
    return best;
}

inline stoptree::NodeData random_node(stoptree::CounterRng& rng, std::size_t n, std::size_t d) {
    std::vector<double> y(n);
    std::vector<double> x(n * d);
    for (auto& v : y) {
        v = rng.next_normal();
    }
    for (auto& v : x) {
        v = rng.next_normal();
    }
    return stoptree::make_node_data(std::move(y), std::move(x), d);
}

inline std::vector<double> row_of(const stoptree::NodeData& data, std::size_t i) {
    std::vector<double> row(data.d);
    for (std::size_t j = 0; j < data.d; ++j) {
        row[j] = data.covariate(i, j);
    }
    return row;
}

} // namespace testutil
