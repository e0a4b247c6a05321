#include "stoptree/boosting.hpp"

#include "stoptree/serialize.hpp"
#include "stoptree/simlab.hpp"
#include "testutil.hpp"

#include <catch2/catch.hpp>

#include <cmath>
#include <limits>

using namespace stoptree;

TEST_CASE("boosting a constant response adds no trees") {
    const NodeData node = make_node_data({7.0, 7.0, 7.0, 7.0}, {1.0, 2.0, 3.0, 4.0}, 1);
    BoostConfig cfg;
    cfg.min_leaf = 1;
    const BoostResult result = boost_fit(node, cfg);
    CHECK(result.model.trees.empty());
    CHECK(result.model.base == 7.0);
    CHECK(result.model.stop_reason == StopReason::root_learner);
    CHECK(boost_predict(result.model, std::vector<double>{123.0}) == 7.0);
}

TEST_CASE("boost_predict is base plus shrunken tree sum") {
    NeufeldConfig gen;
    gen.seed = 3;
    const NodeData data = gen_neufeld(gen);
    BoostConfig cfg;
    cfg.max_iters = 3;
    const BoostResult result = boost_fit(data, cfg);
    REQUIRE_FALSE(result.model.trees.empty());

    const std::vector<double> x = testutil::row_of(data, 0);
    double expected = result.model.base;
    for (const auto& tree : result.model.trees) {
        expected += 0.1 * predict(tree, x);
    }
    CHECK(boost_predict(result.model, x) == Approx(expected).epsilon(1e-15));

    BoostModel one = {result.model.base, result.model.learning_rate,
                      StopReason::max_iters, {}, result.model.d};
    one.trees.push_back(RegressionTree{result.model.trees[0].root->clone(),
                                       result.model.trees[0].d, result.model.trees[0].config});
    CHECK(boost_predict(one, x) ==
          Approx(one.base + 0.1 * predict(one.trees[0], x)).epsilon(1e-15));

    CHECK_THROWS_AS(boost_predict(result.model, std::vector<double>{1.0}),
                    std::invalid_argument);
}

TEST_CASE("boosting on signal reduces training error monotonically") {
    NeufeldConfig gen;
    gen.seed = 12;
    const NodeData data = gen_neufeld(gen);
    BoostConfig cfg;
    cfg.max_iters = 40;
    const BoostResult result = boost_fit(data, cfg);
    REQUIRE(result.model.trees.size() >= 1);

    double var = 0.0;
    double mean = 0.0;
    for (double v : data.y) {
        mean += v;
    }
    mean /= static_cast<double>(data.n());
    for (double v : data.y) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(data.n());

    REQUIRE_FALSE(result.history.empty());
    double prev = std::sqrt(var);
    for (const auto& entry : result.history) {
        CHECK(entry.train_rmse <= prev + 1e-12);
        prev = entry.train_rmse;
    }
    CHECK(result.history.back().train_rmse * result.history.back().train_rmse < var);
}

TEST_CASE("boosting held-out error beats the constant model on signal") {
    NeufeldConfig gen;
    gen.seed = 44;
    const NodeData train = gen_neufeld(gen);
    NeufeldConfig test_gen = gen;
    test_gen.seed = 4444;
    const NodeData test = gen_neufeld(test_gen);

    BoostConfig cfg;
    cfg.max_iters = 50;
    const BoostResult result = boost_fit(train, cfg);
    REQUIRE(result.model.trees.size() >= 1);

    double sse_model = 0.0;
    double sse_const = 0.0;
    for (std::size_t i = 0; i < test.n(); ++i) {
        const auto x = testutil::row_of(test, i);
        const double e = test.y[i] - boost_predict(result.model, x);
        const double c = test.y[i] - result.model.base;
        sse_model += e * e;
        sse_const += c * c;
    }
    CHECK(sse_model < sse_const);
}

TEST_CASE("boosting stops with an empty ensemble on pure noise") {
    std::size_t empty = 0;
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        NullConfig gen{500, 5, 0.0, 0.0, 1.0, CounterRng::substream_key(77, rep)};
        const NodeData data = gen_null(gen);
        const BoostResult result = boost_fit(data, BoostConfig{});
        if (result.model.trees.empty()) {
            CHECK(result.model.stop_reason == StopReason::root_learner);
            ++empty;
        }
        // The vetoing candidate trace is recorded either way.
        CHECK_FALSE(result.last_candidate_cum_p.empty());
        CHECK(result.last_candidate_cum_p.front() == 0.0);
    }
    CHECK(empty >= 8);
}

TEST_CASE("boost_fit is bitwise reproducible") {
    NeufeldConfig gen;
    gen.seed = 5;
    const NodeData data = gen_neufeld(gen);
    BoostConfig cfg;
    cfg.max_iters = 10;
    const BoostResult a = boost_fit(data, cfg);
    const BoostResult b = boost_fit(data, cfg);
    CHECK(serialize(a.model) == serialize(b.model));
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t k = 0; k < a.history.size(); ++k) {
        CHECK(a.history[k].train_rmse == b.history[k].train_rmse);
    }
}

TEST_CASE("max_iters cap is honored and reported") {
    NeufeldConfig gen;
    gen.seed = 9;
    const NodeData data = gen_neufeld(gen);
    BoostConfig cfg;
    cfg.max_iters = 2;
    cfg.delta = std::numeric_limits<double>::infinity();
    const BoostResult result = boost_fit(data, cfg);
    CHECK(result.model.trees.size() == 2);
    CHECK(result.model.stop_reason == StopReason::max_iters);
}

TEST_CASE("boost config validation") {
    CHECK_THROWS_AS(boost_fit(make_node_data({1.0, 2.0}, {0.0, 1.0}, 1),
                              BoostConfig{0.0, 3, 20, 0.05, 10}),
                    std::invalid_argument);
    CHECK_THROWS_AS(boost_fit(make_node_data({1.0, 2.0}, {0.0, 1.0}, 1),
                              BoostConfig{1.5, 3, 20, 0.05, 10}),
                    std::invalid_argument);
    CHECK_THROWS_AS(boost_fit(make_node_data({1.0, 2.0}, {0.0, 1.0}, 1),
                              BoostConfig{0.1, 3, 20, -0.05, 10}),
                    std::invalid_argument);
}
