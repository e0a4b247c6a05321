#pragma once

#include "stoptree/data.hpp"
#include "stoptree/split.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stoptree {

struct GrowConfig {
    std::size_t max_depth = 4;
    std::size_t min_leaf = 20;

    void validate() const {
        if (min_leaf < 1) {
            throw std::invalid_argument("GrowConfig: min_leaf must be >= 1");
        }
    }
};

/// Binary regression tree node. A node is a leaf iff it has no children.
/// Internal nodes carry the split rule and the Bonferroni p-value computed
/// at grow time from the node's own sample size and the global covariate
/// count.
struct TreeNode {
    std::size_t j = 0;
    double threshold = std::numeric_limits<double>::quiet_NaN();
    double p_value = std::numeric_limits<double>::quiet_NaN();
    double mean = 0.0;
    double sse = 0.0; ///< within-node sum of squared errors; not serialized
    std::size_t n_node = 0;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;

    bool is_leaf() const { return left == nullptr; }

    std::size_t leaf_count() const {
        return is_leaf() ? 1 : left->leaf_count() + right->leaf_count();
    }

    std::size_t internal_count() const {
        return is_leaf() ? 0 : 1 + left->internal_count() + right->internal_count();
    }

    /// Sum of leaf SSE over the subtree, the pruning risk R(T_t).
    double leaf_sse() const { return is_leaf() ? sse : left->leaf_sse() + right->leaf_sse(); }

    std::unique_ptr<TreeNode> clone() const {
        auto copy = std::make_unique<TreeNode>();
        copy->j = j;
        copy->threshold = threshold;
        copy->p_value = p_value;
        copy->mean = mean;
        copy->sse = sse;
        copy->n_node = n_node;
        if (!is_leaf()) {
            copy->left = left->clone();
            copy->right = right->clone();
        }
        return copy;
    }
};

/// A grown tree plus the covariate dimension and the settings it was grown
/// with.
struct RegressionTree {
    std::unique_ptr<TreeNode> root;
    std::size_t d = 0;
    GrowConfig config;

    std::size_t leaf_count() const { return root ? root->leaf_count() : 0; }
};

namespace detail {

inline std::unique_ptr<TreeNode> grow_rec(NodeData&& data, std::size_t depth,
                                          const GrowConfig& cfg) {
    auto node = std::make_unique<TreeNode>();
    const std::size_t n = data.n();
    node->n_node = n;
    double mean = 0.0;
    for (double v : data.y) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    node->mean = mean;
    double sse = 0.0;
    for (double v : data.y) {
        const double c = v - mean;
        sse += c * c;
    }
    node->sse = sse;

    if (depth >= cfg.max_depth) {
        return node;
    }
    const auto cand = best_split(data, cfg.min_leaf);
    if (!cand) {
        return node;
    }
    node->j = cand->j_star;
    node->threshold = cand->threshold;
    node->p_value = cand->p_value;

    auto [left, right] = partition_node(data, cand->j_star, cand->threshold);
    data = NodeData{}; // free before recursing
    node->left = grow_rec(std::move(left), depth + 1, cfg);
    node->right = grow_rec(std::move(right), depth + 1, cfg);
    return node;
}

} // namespace detail

/// Grow the full greedy tree: recursive best splits until NoSplit, the
/// depth cap, or node sizes below 2*min_leaf. Deterministic in (data, cfg).
inline RegressionTree grow(const NodeData& data, const GrowConfig& cfg) {
    data.validate();
    cfg.validate();
    RegressionTree tree;
    tree.d = data.d;
    tree.config = cfg;
    NodeData working = data;
    tree.root = detail::grow_rec(std::move(working), 0, cfg);
    return tree;
}

inline RegressionTree grow(const NodeData& data, std::size_t max_depth, std::size_t min_leaf) {
    return grow(data, GrowConfig{max_depth, min_leaf});
}

/// Leaf mean of the region containing x; routing is left iff x_j <= threshold.
inline double predict(const TreeNode& root, std::span<const double> x) {
    const TreeNode* node = &root;
    while (!node->is_leaf()) {
        node = x[node->j] <= node->threshold ? node->left.get() : node->right.get();
    }
    return node->mean;
}

inline double predict(const RegressionTree& tree, std::span<const double> x) {
    if (x.size() != tree.d) {
        throw std::invalid_argument("predict: covariate vector has wrong dimension");
    }
    return predict(*tree.root, x);
}

/// Nested sequence of pruned subtrees, root first, with the p-values each
/// step adds and the running cumulative sum per tree.
struct NestedSequence {
    std::vector<RegressionTree> trees;
    std::vector<std::vector<double>> added_p_values; ///< one list per step
    std::vector<double> cum_p;                       ///< one value per tree
    std::vector<double> alphas;                      ///< effective alpha per step
};

namespace detail {

struct PruneStats {
    double g_min = std::numeric_limits<double>::infinity();
};

/// Minimal effective alpha g(t) = (R(t) - R(T_t)) / (|T_t| - 1) over
/// internal nodes of the subtree.
inline void min_effective_alpha(const TreeNode& node, PruneStats& stats) {
    if (node.is_leaf()) {
        return;
    }
    const double g = (node.sse - node.leaf_sse()) /
                     (static_cast<double>(node.leaf_count()) - 1.0);
    if (g < stats.g_min) {
        stats.g_min = g;
    }
    min_effective_alpha(*node.left, stats);
    min_effective_alpha(*node.right, stats);
}

inline void collect_internal_p(const TreeNode& node, std::vector<double>& out) {
    if (node.is_leaf()) {
        return;
    }
    out.push_back(node.p_value);
    collect_internal_p(*node.left, out);
    collect_internal_p(*node.right, out);
}

/// Collapse, top down, every internal node whose effective alpha equals
/// g_min; collapsed subtrees record their internal p-values in preorder.
inline void collapse_at(TreeNode& node, double g_min, std::vector<double>& removed) {
    if (node.is_leaf()) {
        return;
    }
    const double g = (node.sse - node.leaf_sse()) /
                     (static_cast<double>(node.leaf_count()) - 1.0);
    if (g == g_min) {
        collect_internal_p(node, removed);
        node.left.reset();
        node.right.reset();
        node.threshold = std::numeric_limits<double>::quiet_NaN();
        node.p_value = std::numeric_limits<double>::quiet_NaN();
        node.j = 0;
        return;
    }
    collapse_at(*node.left, g_min, removed);
    collapse_at(*node.right, g_min, removed);
}

} // namespace detail

/// Weakest-link cost-complexity pruning of a grown tree. Repeatedly
/// collapses the internal node(s) with minimal effective alpha until only
/// the root remains; ties collapse simultaneously, so a single step may
/// remove more than one split. Returned root first, so leaf counts grow
/// strictly along the sequence and each tree is a subtree of its successor.
///
/// cum_p is accumulated incrementally from the per-step added p-values,
/// which keeps it nondecreasing under floating point.
inline NestedSequence cost_complexity_sequence(const RegressionTree& full) {
    if (!full.root) {
        throw std::invalid_argument("cost_complexity_sequence: empty tree");
    }
    std::unique_ptr<TreeNode> work = full.root->clone();

    std::vector<std::unique_ptr<TreeNode>> snapshots;
    std::vector<std::vector<double>> removed_per_step;
    std::vector<double> alphas_backward;

    snapshots.push_back(work->clone());
    while (!work->is_leaf()) {
        detail::PruneStats stats;
        detail::min_effective_alpha(*work, stats);
        std::vector<double> removed;
        detail::collapse_at(*work, stats.g_min, removed);
        alphas_backward.push_back(stats.g_min);
        removed_per_step.push_back(std::move(removed));
        snapshots.push_back(work->clone());
    }

    NestedSequence seq;
    const std::size_t count = snapshots.size();
    seq.trees.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        RegressionTree t;
        t.root = std::move(snapshots[count - 1 - k]);
        t.d = full.d;
        t.config = full.config;
        seq.trees.push_back(std::move(t));
    }
    seq.added_p_values.assign(removed_per_step.rbegin(), removed_per_step.rend());
    seq.alphas.assign(alphas_backward.rbegin(), alphas_backward.rend());

    seq.cum_p.resize(count);
    seq.cum_p[0] = 0.0;
    for (std::size_t k = 1; k < count; ++k) {
        double step = seq.cum_p[k - 1];
        for (double p : seq.added_p_values[k - 1]) {
            step += p;
        }
        seq.cum_p[k] = step;
    }
    return seq;
}

/// Subtree selected by penalty theta: keep collapsing while the step alpha
/// is <= theta. Index into the root-first sequence.
inline std::size_t prune_index_at(const NestedSequence& seq, double theta) {
    std::size_t collapsed = 0;
    for (std::size_t s = seq.alphas.size(); s-- > 0;) {
        if (seq.alphas[s] <= theta) {
            ++collapsed;
        } else {
            break;
        }
    }
    return seq.trees.size() - 1 - collapsed;
}

/// Field-wise structural equality on the serialized attributes (structure,
/// split rule, p-value, mean, n). sse is a fitting artifact and excluded.
inline bool trees_equal(const TreeNode& a, const TreeNode& b) {
    if (a.is_leaf() != b.is_leaf()) {
        return false;
    }
    if (a.mean != b.mean || a.n_node != b.n_node) {
        return false;
    }
    if (a.is_leaf()) {
        return true;
    }
    if (a.j != b.j || a.threshold != b.threshold || a.p_value != b.p_value) {
        return false;
    }
    return trees_equal(*a.left, *b.left) && trees_equal(*a.right, *b.right);
}

inline bool trees_equal(const RegressionTree& a, const RegressionTree& b) {
    if (a.d != b.d || a.config.max_depth != b.config.max_depth ||
        a.config.min_leaf != b.config.min_leaf) {
        return false;
    }
    if ((a.root == nullptr) != (b.root == nullptr)) {
        return false;
    }
    return !a.root || trees_equal(*a.root, *b.root);
}

/// True if a is a subtree of b in the pruning sense: same root rule and
/// every internal node of a present in b.
inline bool is_pruned_subtree(const TreeNode& a, const TreeNode& b) {
    if (a.is_leaf()) {
        return true; // b may extend below a collapsed node
    }
    if (b.is_leaf()) {
        return false;
    }
    if (a.j != b.j || a.threshold != b.threshold) {
        return false;
    }
    return is_pruned_subtree(*a.left, *b.left) && is_pruned_subtree(*a.right, *b.right);
}

} // namespace stoptree
