#include "stoptree/serialize.hpp"

#include "stoptree/simlab.hpp"
#include "testutil.hpp"

#include <catch2/catch.hpp>

#include <string>

using namespace stoptree;

TEST_CASE("tree serialization round trip is the identity") {
    CounterRng rng(606);
    for (int rep = 0; rep < 20; ++rep) {
        const NodeData data = testutil::random_node(rng, 40 + rng.next_below(60), 3);
        const RegressionTree tree = grow(data, 1 + rng.next_below(4), 2);
        const std::string text = serialize(tree);
        const RegressionTree back = deserialize_tree(text);
        CHECK(trees_equal(tree, back));
        CHECK(serialize(back) == text); // stable bytes through a second pass
    }
}

TEST_CASE("leaf-only tree serializes to a minimal document") {
    const NodeData node = make_node_data({2.0, 2.0}, {0.0, 1.0}, 1);
    const RegressionTree tree = grow(node, 4, 1);
    const json doc = json::parse(serialize(tree));
    REQUIRE(doc.contains("root"));
    REQUIRE(doc["root"].contains("leaf"));
    CHECK(doc["root"]["leaf"]["mean"] == 2.0);
    CHECK(doc["root"]["leaf"]["n"] == 2);
    CHECK_FALSE(doc["root"].contains("split"));
}

TEST_CASE("p-values above one are stored unclamped") {
    RegressionTree tree;
    tree.d = 7;
    auto root = std::make_unique<TreeNode>();
    root->j = 6;
    root->threshold = 0.3;
    root->p_value = 5.69;
    root->mean = 0.75;
    root->n_node = 120;
    root->left = std::make_unique<TreeNode>();
    root->left->mean = 0.5;
    root->left->n_node = 60;
    root->right = std::make_unique<TreeNode>();
    root->right->mean = 1.0;
    root->right->n_node = 60;
    tree.root = std::move(root);

    const std::string text = serialize(tree);
    const RegressionTree back = deserialize_tree(text);
    CHECK(back.root->p_value == 5.69);
    CHECK(json::parse(text)["root"]["split"]["p_value"] == 5.69);
}

TEST_CASE("doubles survive bitwise through the decimal form") {
    RegressionTree tree;
    tree.d = 1;
    auto root = std::make_unique<TreeNode>();
    root->j = 0;
    root->threshold = 0.1 + 0.2; // 0.30000000000000004
    root->p_value = 1.7154713753414543e-43;
    root->mean = -1.0 / 3.0;
    root->n_node = 40;
    root->left = std::make_unique<TreeNode>();
    root->left->mean = 2.2250738585072014e-308; // smallest normal double
    root->left->n_node = 20;
    root->right = std::make_unique<TreeNode>();
    root->right->mean = 0.1;
    root->right->n_node = 20;
    tree.root = std::move(root);

    const RegressionTree back = deserialize_tree(serialize(tree));
    CHECK(back.root->threshold == 0.1 + 0.2);
    CHECK(back.root->p_value == 1.7154713753414543e-43);
    CHECK(back.root->mean == -1.0 / 3.0);
    CHECK(back.root->left->mean == 2.2250738585072014e-308);
}

TEST_CASE("sequence serialization round trip") {
    NeufeldConfig cfg;
    cfg.seed = 13;
    const NodeData data = gen_neufeld(cfg);
    const NestedSequence seq = cost_complexity_sequence(grow(data, 3, 20));
    const std::string text = serialize(seq);
    const NestedSequence back = deserialize_sequence(text);
    REQUIRE(back.trees.size() == seq.trees.size());
    for (std::size_t k = 0; k < seq.trees.size(); ++k) {
        CHECK(trees_equal(*seq.trees[k].root, *back.trees[k].root));
    }
    CHECK(back.cum_p == seq.cum_p);
    CHECK(back.added_p_values == seq.added_p_values);
    CHECK(back.alphas == seq.alphas);
}

TEST_CASE("boost model serialization round trip") {
    NeufeldConfig cfg;
    cfg.seed = 23;
    const NodeData data = gen_neufeld(cfg);
    BoostConfig bc;
    bc.max_iters = 3;
    const BoostResult result = boost_fit(data, bc);
    REQUIRE_FALSE(result.model.trees.empty());

    const std::string text = serialize(result.model);
    const BoostModel back = deserialize_boost(text);
    CHECK(back.base == result.model.base);
    CHECK(back.learning_rate == result.model.learning_rate);
    CHECK(back.stop_reason == result.model.stop_reason);
    CHECK(back.d == result.model.d);
    REQUIRE(back.trees.size() == result.model.trees.size());
    for (std::size_t k = 0; k < back.trees.size(); ++k) {
        CHECK(trees_equal(back.trees[k], result.model.trees[k]));
    }

    const std::vector<double> x = testutil::row_of(data, 3);
    CHECK(boost_predict(back, x) == boost_predict(result.model, x));
}

TEST_CASE("malformed JSON reports line and column") {
    const std::string bad = "{\n  \"d\": 1,\n  \"config\": oops\n}\n";
    try {
        deserialize_tree(bad);
        FAIL("expected a parse error");
    } catch (const SerializeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("column") != std::string::npos);
    }
}

TEST_CASE("schema violations are rejected") {
    CHECK_THROWS_AS(deserialize_tree("{}"), SerializeError);
    CHECK_THROWS_AS(deserialize_tree(R"({"d":1,"config":{"max_depth":1,"min_leaf":1},"root":{}})"),
                    SerializeError);
    // Child sizes that do not add up.
    const std::string inconsistent = R"({
      "d": 1,
      "config": {"max_depth": 1, "min_leaf": 1},
      "root": {"split": {"j": 0, "threshold": 0.5, "p_value": 0.1, "n": 10, "mean": 0.0,
               "left": {"leaf": {"mean": 0.0, "n": 3}},
               "right": {"leaf": {"mean": 1.0, "n": 3}}}}
    })";
    CHECK_THROWS_AS(deserialize_tree(inconsistent), SerializeError);
    CHECK_THROWS_AS(deserialize_boost(R"({"base":0.0,"learning_rate":0.1,)"
                                      R"("stop_reason":"bogus","trees":[]})"),
                    SerializeError);
}
