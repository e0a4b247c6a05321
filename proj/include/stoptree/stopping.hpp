#pragma once

#include "stoptree/tree.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace stoptree {

/// Tolerance for the cumulative p-value rule. delta = infinity disables
/// the rule (the last tree of the sequence is then selected).
struct StopConfig {
    double delta = 0.05;

    void validate() const {
        if (!(delta > 0.0)) {
            throw std::invalid_argument("StopConfig: delta must be positive (or infinity)");
        }
    }
};

struct SelectionReport {
    std::size_t selected_index = 0;
    std::size_t selected_leaves = 1;
    std::vector<double> cum_p_trace;
    std::optional<std::size_t> stopped_at; ///< first violating tree, if any
};

/// Walk the nested sequence in order and stop at the first tree whose
/// cumulative p-value exceeds delta; its predecessor is selected. The root
/// has an empty sum and is always selectable.
inline SelectionReport select_tree(const NestedSequence& seq, const StopConfig& cfg) {
    cfg.validate();
    if (seq.trees.empty() || seq.cum_p.size() != seq.trees.size()) {
        throw std::invalid_argument("select_tree: malformed sequence");
    }
    SelectionReport report;
    report.cum_p_trace = seq.cum_p;
    std::size_t selected = seq.trees.size() - 1;
    for (std::size_t k = 0; k < seq.cum_p.size(); ++k) {
        if (seq.cum_p[k] > cfg.delta) {
            report.stopped_at = k;
            selected = k - 1; // k >= 1 since cum_p[0] == 0 <= delta
            break;
        }
    }
    report.selected_index = selected;
    report.selected_leaves = seq.trees[selected].leaf_count();
    return report;
}

/// Single-split acceptance inequality mse1 - mse2 - penalty * sigma2 > 0.
/// With the penalty from penalty_constant this realizes the p-value, Cp
/// and BIC comparators.
inline bool accept_single_split(double mse1, double mse2, double sigma2_hat, double penalty) {
    return mse1 - mse2 - penalty * sigma2_hat > 0.0;
}

} // namespace stoptree
