#pragma once

#include "stoptree/stopping.hpp"
#include "stoptree/tree.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stoptree {

struct BoostConfig {
    double learning_rate = 0.1;
    std::size_t max_depth = 3;
    std::size_t min_leaf = 20;
    double delta = 0.05; ///< accepts infinity
    std::size_t max_iters = 10000;

    void validate() const {
        if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
            throw std::invalid_argument("BoostConfig: learning_rate must lie in (0,1]");
        }
        if (max_iters < 1) {
            throw std::invalid_argument("BoostConfig: max_iters must be >= 1");
        }
        StopConfig{delta}.validate();
        GrowConfig{max_depth, min_leaf}.validate();
    }
};

enum class StopReason { root_learner, max_iters };

inline std::string to_string(StopReason r) {
    return r == StopReason::root_learner ? "root_learner" : "max_iters";
}

/// Additive ensemble of shrunken trees fit to successive residuals.
/// prediction(x) = base + learning_rate * sum_i predict(trees[i], x).
struct BoostModel {
    double base = 0.0;
    double learning_rate = 0.1;
    StopReason stop_reason = StopReason::root_learner;
    std::vector<RegressionTree> trees;
    std::size_t d = 0; ///< 0 when unknown (deserialized empty ensemble)
};

struct BoostIterationLog {
    std::size_t iteration = 0; ///< 1-based
    double train_rmse = 0.0;   ///< after adding this learner
    std::size_t leaves = 0;
};

struct BoostResult {
    BoostModel model;
    std::vector<BoostIterationLog> history;
    /// Cumulative p-value trace of the final candidate sequence, recorded
    /// for transparency; under root_learner it is the trace that vetoed
    /// the next learner.
    std::vector<double> last_candidate_cum_p;
};

inline double boost_predict(const BoostModel& model, std::span<const double> x) {
    if (model.d != 0 && x.size() != model.d) {
        throw std::invalid_argument("boost_predict: covariate vector has wrong dimension");
    }
    double sum = 0.0;
    for (const auto& tree : model.trees) {
        sum += predict(*tree.root, x);
    }
    return model.base + model.learning_rate * sum;
}

/// L2 boosting with the p-value-selected tree as weak learner. Each
/// iteration grows a full tree on the current residuals, prunes it, applies
/// the cumulative p-value rule, and stops as soon as the selected learner
/// is a bare root (which is never added to the ensemble).
inline BoostResult boost_fit(const NodeData& data, const BoostConfig& cfg) {
    data.validate();
    cfg.validate();

    const std::size_t n = data.n();
    BoostResult result;
    BoostModel& model = result.model;
    model.learning_rate = cfg.learning_rate;
    model.d = data.d;

    double base = 0.0;
    for (double v : data.y) {
        base += v;
    }
    base /= static_cast<double>(n);
    model.base = base;

    NodeData working = data;
    for (std::size_t i = 0; i < n; ++i) {
        working.y[i] -= base;
    }

    const GrowConfig grow_cfg{cfg.max_depth, cfg.min_leaf};
    const StopConfig stop_cfg{cfg.delta};
    std::vector<double> row(data.d);

    model.stop_reason = StopReason::max_iters;
    for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
        RegressionTree full = grow(working, grow_cfg);
        NestedSequence seq = cost_complexity_sequence(full);
        SelectionReport sel = select_tree(seq, stop_cfg);
        result.last_candidate_cum_p = sel.cum_p_trace;

        if (sel.selected_leaves <= 1) {
            model.stop_reason = StopReason::root_learner;
            break;
        }

        RegressionTree& learner = seq.trees[sel.selected_index];
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < data.d; ++c) {
                row[c] = working.covariate(i, c);
            }
            working.y[i] -= cfg.learning_rate * predict(*learner.root, row);
            sse += working.y[i] * working.y[i];
        }
        result.history.push_back(
            {iter, std::sqrt(sse / static_cast<double>(n)), learner.leaf_count()});
        model.trees.push_back(std::move(learner));
    }
    return result;
}

} // namespace stoptree
