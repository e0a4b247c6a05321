#pragma once

#include "stoptree/data.hpp"
#include "stoptree/pvalue.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace stoptree {

/// Within-group sums of squares around the rank-r cut of an ordered
/// response: below the cut, above it, and for the whole vector.
struct SSums {
    double s_le = 0.0;
    double s_gt = 0.0;
    double s_total = 0.0;
};

namespace detail {

inline double sum_squared_deviations(std::span<const double> v) {
    if (v.empty()) {
        return 0.0;
    }
    double mean = 0.0;
    for (double e : v) {
        mean += e;
    }
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double e : v) {
        const double c = e - mean;
        ss += c * c;
    }
    return ss;
}

} // namespace detail

/// S_{<=r}, S_{>r} and S for a response already ordered by the covariate
/// under consideration. r counts the left group, 1 <= r <= n-1.
inline SSums s_sums(std::span<const double> y_sorted, std::size_t r) {
    const std::size_t n = y_sorted.size();
    if (r < 1 || r > n - 1 || n < 2) {
        throw std::domain_error("s_sums: rank must satisfy 1 <= r <= n-1");
    }
    SSums s;
    s.s_le = detail::sum_squared_deviations(y_sorted.subspan(0, r));
    s.s_gt = detail::sum_squared_deviations(y_sorted.subspan(r));
    s.s_total = detail::sum_squared_deviations(y_sorted);
    return s;
}

/// Best greedy binary L2 split of a node: covariate, rank and threshold
/// maximizing the loss improvement, with the scaled statistic and its
/// Bonferroni p-value.
struct SplitCandidate {
    std::size_t j_star = 0;        ///< covariate index, 0-based
    std::size_t r_star = 0;        ///< left-group size in covariate order, 1..n-1
    double threshold = 0.0;        ///< midpoint of the straddling covariate values
    double u_scaled = 0.0;         ///< n * rel_improvement
    double rel_improvement = 0.0;  ///< (S - (S_le + S_gt)) / S, in [0,1]
    double p_value = 1.0;          ///< d * p_n(u_scaled); 1.0 sentinel below n=20
    double left_mean = 0.0;
    double right_mean = 0.0;
};

/// Bonferroni p-value of an observed scaled statistic on a node of size n
/// with d covariates. Nodes below the approximation floor get the sentinel
/// value 1.0 instead of an extrapolated approximation.
inline double split_p_value(double u_scaled, std::size_t n, std::size_t d) {
    if (n < kMinApproxSampleSize) {
        return 1.0;
    }
    return bonferroni_p(u_scaled, PValueParams{n, d});
}

inline double split_p_value(const SplitCandidate& cand, std::size_t n, std::size_t d) {
    return split_p_value(cand.u_scaled, n, d);
}

/// Candidates whose improvements differ by no more than this relative
/// amount count as tied. Mathematical ties happen whenever two covariates
/// induce the same row partition (possibly with sides swapped); rounding
/// then jitters the two evaluations by a few ulp, far below this bound,
/// while genuinely distinct candidates on continuous data sit far above it.
inline constexpr double kSplitTieRelTol = 1e-12;

/// Scan all covariates and admissible ranks for the split maximizing the
/// L2 improvement. Returns std::nullopt when the node cannot be split:
/// zero total sum of squares, n < 2*min_leaf, or no covariate with two
/// distinct values.
///
/// One sort per covariate, then a single pass over prefix sums of the
/// centered response. Ranks are only admissible between strictly distinct
/// consecutive covariate values and when both children keep min_leaf rows.
/// Ties in the maximum are broken toward the smallest covariate index,
/// then the smallest rank, so the scan is deterministic and independent of
/// evaluation order.
inline std::optional<SplitCandidate> best_split(const NodeData& node, std::size_t min_leaf) {
    const std::size_t n = node.n();
    if (n == 0) {
        throw std::invalid_argument("best_split: empty node");
    }
    if (min_leaf < 1) {
        throw std::invalid_argument("best_split: min_leaf must be >= 1");
    }
    if (n < 2 * min_leaf) {
        return std::nullopt;
    }

    const auto [y_min, y_max] = std::minmax_element(node.y.begin(), node.y.end());
    if (*y_min == *y_max) {
        return std::nullopt; // constant response
    }

    double mean = 0.0;
    for (double v : node.y) {
        mean += v;
    }
    mean /= static_cast<double>(n);

    std::vector<double> centered(n);
    double s_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        centered[i] = node.y[i] - mean;
        s_total += centered[i] * centered[i];
    }
    if (!(s_total > 0.0)) {
        return std::nullopt;
    }

    double best_improvement = -1.0;
    std::size_t best_j = 0;
    std::size_t best_r = 0;
    double best_prefix = 0.0;
    double best_lo = 0.0;
    double best_hi = 0.0;

    std::vector<std::size_t> order(n);
    const double nd = static_cast<double>(n);
    for (std::size_t j = 0; j < node.d; ++j) {
        const double* col = node.x.data() + j * n;
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [col](std::size_t a, std::size_t b) {
            return col[a] < col[b] || (col[a] == col[b] && a < b);
        });

        double prefix = 0.0;
        for (std::size_t r = 1; r < n; ++r) {
            prefix += centered[order[r - 1]];
            if (r < min_leaf || n - r < min_leaf) {
                continue;
            }
            const double lo = col[order[r - 1]];
            const double hi = col[order[r]];
            if (lo == hi) {
                continue; // tied covariate values, not a boundary
            }
            const double improvement =
                prefix * prefix * nd / (static_cast<double>(r) * static_cast<double>(n - r));
            if (improvement > best_improvement * (1.0 + kSplitTieRelTol)) {
                best_improvement = improvement;
                best_j = j;
                best_r = r;
                best_prefix = prefix;
                best_lo = lo;
                best_hi = hi;
            }
        }
    }

    if (best_improvement < 0.0) {
        return std::nullopt; // no admissible boundary anywhere
    }

    SplitCandidate cand;
    cand.j_star = best_j;
    cand.r_star = best_r;
    cand.threshold = 0.5 * (best_lo + best_hi);
    cand.rel_improvement = best_improvement / s_total;
    cand.u_scaled = nd * cand.rel_improvement;
    cand.left_mean = mean + best_prefix / static_cast<double>(best_r);
    cand.right_mean = mean - best_prefix / static_cast<double>(n - best_r);
    cand.p_value = split_p_value(cand.u_scaled, n, node.d);
    return cand;
}

/// Partition a node by x_j <= threshold, preserving row order on both sides.
inline std::pair<NodeData, NodeData> partition_node(const NodeData& node, std::size_t j,
                                                    double threshold) {
    const std::size_t n = node.n();
    NodeData left;
    NodeData right;
    left.d = right.d = node.d;

    std::vector<char> goes_left(n);
    std::size_t n_left = 0;
    for (std::size_t i = 0; i < n; ++i) {
        goes_left[i] = node.covariate(i, j) <= threshold;
        n_left += goes_left[i];
    }
    const std::size_t n_right = n - n_left;

    left.y.reserve(n_left);
    left.row_ids.reserve(n_left);
    right.y.reserve(n_right);
    right.row_ids.reserve(n_right);
    for (std::size_t i = 0; i < n; ++i) {
        auto& side = goes_left[i] ? left : right;
        side.y.push_back(node.y[i]);
        side.row_ids.push_back(node.row_ids[i]);
    }
    left.x.resize(n_left * node.d);
    right.x.resize(n_right * node.d);
    for (std::size_t c = 0; c < node.d; ++c) {
        const double* src = node.x.data() + c * n;
        double* dst_l = left.x.data() + c * n_left;
        double* dst_r = right.x.data() + c * n_right;
        for (std::size_t i = 0; i < n; ++i) {
            if (goes_left[i]) {
                *dst_l++ = src[i];
            } else {
                *dst_r++ = src[i];
            }
        }
    }
    return {std::move(left), std::move(right)};
}

} // namespace stoptree
