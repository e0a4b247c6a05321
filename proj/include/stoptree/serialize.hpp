#pragma once

#include "stoptree/boosting.hpp"
#include "stoptree/tree.hpp"

#include <json.hpp>

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace stoptree {

struct SerializeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using json = nlohmann::ordered_json;

namespace detail {

inline json node_to_json(const TreeNode& node) {
    if (node.is_leaf()) {
        return json{{"leaf", {{"mean", node.mean}, {"n", node.n_node}}}};
    }
    json split;
    split["j"] = node.j;
    split["threshold"] = node.threshold;
    split["p_value"] = node.p_value;
    split["n"] = node.n_node;
    split["mean"] = node.mean;
    split["left"] = node_to_json(*node.left);
    split["right"] = node_to_json(*node.right);
    return json{{"split", std::move(split)}};
}

inline std::unique_ptr<TreeNode> node_from_json(const json& j) {
    auto node = std::make_unique<TreeNode>();
    if (j.contains("leaf")) {
        const json& leaf = j.at("leaf");
        node->mean = leaf.at("mean").get<double>();
        node->n_node = leaf.at("n").get<std::size_t>();
        return node;
    }
    if (!j.contains("split")) {
        throw SerializeError("tree node must contain either 'leaf' or 'split'");
    }
    const json& split = j.at("split");
    node->j = split.at("j").get<std::size_t>();
    node->threshold = split.at("threshold").get<double>();
    node->p_value = split.at("p_value").get<double>();
    node->n_node = split.at("n").get<std::size_t>();
    node->mean = split.at("mean").get<double>();
    node->left = node_from_json(split.at("left"));
    node->right = node_from_json(split.at("right"));
    if (node->n_node != node->left->n_node + node->right->n_node) {
        throw SerializeError("split node sizes do not add up");
    }
    return node;
}

inline json config_to_json(const GrowConfig& cfg) {
    return json{{"max_depth", cfg.max_depth}, {"min_leaf", cfg.min_leaf}};
}

inline GrowConfig config_from_json(const json& j) {
    GrowConfig cfg;
    cfg.max_depth = j.at("max_depth").get<std::size_t>();
    cfg.min_leaf = j.at("min_leaf").get<std::size_t>();
    return cfg;
}

inline void describe_parse_position(const std::string_view text, std::size_t byte,
                                    std::size_t& line, std::size_t& column) {
    line = 1;
    column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
}

inline json parse_checked(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 0;
        std::size_t column = 0;
        describe_parse_position(text, e.byte > 0 ? e.byte - 1 : 0, line, column);
        throw SerializeError(std::string(what) + ": parse error at line " +
                             std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + e.what());
    }
}

} // namespace detail

// Model file: {"d": int, "config": {...}, "root": node}. Reals are stored
// in shortest round-trip decimal form, so deserialize(serialize(t)) == t
// bitwise on every stored value. Within-node SSE is a fitting artifact and
// not part of the document.

inline std::string serialize(const RegressionTree& tree) {
    if (!tree.root) {
        throw SerializeError("cannot serialize an empty tree");
    }
    json doc;
    doc["d"] = tree.d;
    doc["config"] = detail::config_to_json(tree.config);
    doc["root"] = detail::node_to_json(*tree.root);
    return doc.dump(2) + "\n";
}

inline RegressionTree deserialize_tree(std::string_view text) {
    const json doc = detail::parse_checked(text, "tree model");
    try {
        RegressionTree tree;
        tree.d = doc.at("d").get<std::size_t>();
        tree.config = detail::config_from_json(doc.at("config"));
        tree.root = detail::node_from_json(doc.at("root"));
        return tree;
    } catch (const nlohmann::json::exception& e) {
        throw SerializeError(std::string("tree model: invalid document: ") + e.what());
    }
}

// Sequence file: the model roots of the nested trees plus the cumulative
// p-values, the per-step added p-values and the pruning alphas.

inline std::string serialize(const NestedSequence& seq) {
    if (seq.trees.empty()) {
        throw SerializeError("cannot serialize an empty sequence");
    }
    json doc;
    doc["d"] = seq.trees.front().d;
    doc["config"] = detail::config_to_json(seq.trees.front().config);
    json roots = json::array();
    for (const auto& tree : seq.trees) {
        roots.push_back(detail::node_to_json(*tree.root));
    }
    doc["roots"] = std::move(roots);
    doc["cum_p"] = seq.cum_p;
    doc["added_p_values"] = seq.added_p_values;
    doc["alphas"] = seq.alphas;
    return doc.dump(2) + "\n";
}

inline NestedSequence deserialize_sequence(std::string_view text) {
    const json doc = detail::parse_checked(text, "sequence file");
    try {
        NestedSequence seq;
        const auto d = doc.at("d").get<std::size_t>();
        const GrowConfig cfg = detail::config_from_json(doc.at("config"));
        for (const json& root : doc.at("roots")) {
            RegressionTree tree;
            tree.d = d;
            tree.config = cfg;
            tree.root = detail::node_from_json(root);
            seq.trees.push_back(std::move(tree));
        }
        seq.cum_p = doc.at("cum_p").get<std::vector<double>>();
        seq.added_p_values = doc.at("added_p_values").get<std::vector<std::vector<double>>>();
        seq.alphas = doc.at("alphas").get<std::vector<double>>();
        if (seq.cum_p.size() != seq.trees.size() ||
            seq.added_p_values.size() + 1 != seq.trees.size()) {
            throw SerializeError("sequence file: inconsistent array lengths");
        }
        return seq;
    } catch (const nlohmann::json::exception& e) {
        throw SerializeError(std::string("sequence file: invalid document: ") + e.what());
    }
}

// Boost model file: {"base", "learning_rate", "stop_reason", "trees"} with
// one full tree document per weak learner.

inline std::string serialize(const BoostModel& model) {
    json doc;
    doc["base"] = model.base;
    doc["learning_rate"] = model.learning_rate;
    doc["stop_reason"] = to_string(model.stop_reason);
    json trees = json::array();
    for (const auto& tree : model.trees) {
        json t;
        t["d"] = tree.d;
        t["config"] = detail::config_to_json(tree.config);
        t["root"] = detail::node_to_json(*tree.root);
        trees.push_back(std::move(t));
    }
    doc["trees"] = std::move(trees);
    return doc.dump(2) + "\n";
}

inline BoostModel deserialize_boost(std::string_view text) {
    const json doc = detail::parse_checked(text, "boost model");
    try {
        BoostModel model;
        model.base = doc.at("base").get<double>();
        model.learning_rate = doc.at("learning_rate").get<double>();
        const auto reason = doc.at("stop_reason").get<std::string>();
        if (reason == "root_learner") {
            model.stop_reason = StopReason::root_learner;
        } else if (reason == "max_iters") {
            model.stop_reason = StopReason::max_iters;
        } else {
            throw SerializeError("boost model: unknown stop_reason '" + reason + "'");
        }
        for (const json& t : doc.at("trees")) {
            RegressionTree tree;
            tree.d = t.at("d").get<std::size_t>();
            tree.config = detail::config_from_json(t.at("config"));
            tree.root = detail::node_from_json(t.at("root"));
            model.trees.push_back(std::move(tree));
        }
        model.d = model.trees.empty() ? 0 : model.trees.front().d;
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw SerializeError(std::string("boost model: invalid document: ") + e.what());
    }
}

} // namespace stoptree
