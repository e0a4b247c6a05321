#include "stoptree/pvalue.hpp"

#include <catch2/catch.hpp>

#include <cmath>

using namespace stoptree;

TEST_CASE("p_value_approx reproduces frozen reference evaluations") {
    // High-precision evaluations of the closed form, frozen.
    CHECK(p_value_approx(9.12, {50, 1}) == Approx(0.049937985064855073).epsilon(1e-12));
    CHECK(p_value_approx(16.31, {1000, 1}) == Approx(0.0049949240464988759).epsilon(1e-12));
    CHECK(p_value_approx(4.0, {50, 1}) == Approx(0.42312359760476849).epsilon(1e-12));
    CHECK(p_value_approx(25.0, {1000, 1}) == Approx(0.00010040053796529711).epsilon(1e-12));
    CHECK(p_value_approx(12.0, {100000, 1}) == Approx(0.063203969383033829).epsilon(1e-12));
}

TEST_CASE("p_value_approx tabulated behavior") {
    // The 0.95-level entry for one covariate at n=50.
    CHECK(p_value_approx(9.12, {50, 1}) == Approx(0.05).margin(0.002));
    // A zero statistic is never significant.
    const double p0 = p_value_approx(0.0, {1000, 1});
    CHECK(p0 > 0.99);
    CHECK(p0 <= 1.0);
    // The d=10 entry at n=1000 solves 10 p_n(u) = 0.05.
    CHECK(p_value_approx(16.31, {1000, 10}) == Approx(0.005).margin(0.0005));
}

TEST_CASE("p_value_approx domain errors") {
    CHECK_THROWS_AS(p_value_approx(1.0, {19, 1}), std::domain_error);
    CHECK_THROWS_AS(p_value_approx(1.0, {0, 1}), std::domain_error);
    CHECK_THROWS_AS(p_value_approx(-0.5, {50, 1}), std::domain_error);
    CHECK_THROWS_AS(p_value_approx(1.0, {50, 0}), std::domain_error);
    CHECK_NOTHROW(p_value_approx(1.0, {20, 1}));
}

TEST_CASE("p_value_approx is strictly decreasing in u") {
    for (std::size_t n : {std::size_t{20}, std::size_t{50}, std::size_t{1000},
                          std::size_t{1000000}}) {
        const PValueParams params{n, 1};
        double prev = p_value_approx(0.0, params);
        for (double u = 0.01; u <= 100.0 + 1e-9; u += 0.01) {
            const double cur = p_value_approx(u, params);
            if (!(cur < prev)) {
                CAPTURE(n, u, prev, cur);
                REQUIRE(cur < prev);
            }
            prev = cur;
        }
    }
}

TEST_CASE("bonferroni_p scales linearly in d and stays unclamped") {
    CHECK(bonferroni_p(9.12, {50, 1}) == Approx(0.05).margin(0.002));
    CHECK(bonferroni_p(9.12, {50, 10}) == Approx(10.0 * p_value_approx(9.12, {50, 10})));
    CHECK(bonferroni_p(9.12, {50, 10}) == Approx(0.5).margin(0.02));
    CHECK(bonferroni_p(14.23, {50, 10}) == Approx(0.05).margin(0.005));
    // Large d with a small statistic pushes the bound above one; the raw
    // value is kept.
    CHECK(bonferroni_p(1.0, {50, 10}) > 1.0);
}

TEST_CASE("critical_value reproduces the tabulated quantile approximations") {
    CHECK(critical_value(0.05, {50, 1}) == Approx(9.12).margin(0.01));
    CHECK(critical_value(0.05, {1000, 1}) == Approx(11.09).margin(0.01));
    CHECK(critical_value(0.05, {50, 2}) == Approx(10.67).margin(0.01));
    CHECK(critical_value(0.05, {1000, 2}) == Approx(12.68).margin(0.01));
    CHECK(critical_value(0.05, {50, 10}) == Approx(14.23).margin(0.01));
    CHECK(critical_value(0.05, {1000, 10}) == Approx(16.31).margin(0.01));
}

TEST_CASE("critical_value round trip against bonferroni_p") {
    for (double eps : {0.001, 0.01, 0.05, 0.5}) {
        for (std::size_t n : {std::size_t{20}, std::size_t{50}, std::size_t{1000}}) {
            for (std::size_t d : {std::size_t{1}, std::size_t{2}, std::size_t{10}}) {
                const PValueParams params{n, d};
                const double u = critical_value(eps, params);
                CAPTURE(eps, n, d, u);
                CHECK(std::fabs(bonferroni_p(u, params) - eps) <= 1e-8);
            }
        }
    }
}

TEST_CASE("critical_value ordering in d and n") {
    for (std::size_t n : {std::size_t{50}, std::size_t{1000}}) {
        CHECK(critical_value(0.05, {n, 1}) < critical_value(0.05, {n, 2}));
        CHECK(critical_value(0.05, {n, 2}) < critical_value(0.05, {n, 10}));
    }
    for (std::size_t d : {std::size_t{1}, std::size_t{2}, std::size_t{10}}) {
        CHECK(critical_value(0.05, {50, d}) < critical_value(0.05, {1000, d}));
    }
}

TEST_CASE("critical_value grows slower than the iterated logarithm") {
    double prev = std::numeric_limits<double>::infinity();
    for (double n : {1e3, 1e6, 1e9, 1e12}) {
        const double ratio =
            critical_value(0.05, {static_cast<std::size_t>(n), 1}) / iterated_log(n, 2);
        CHECK(ratio < prev);
        prev = ratio;
    }
}

TEST_CASE("critical_value domain errors") {
    CHECK_THROWS_AS(critical_value(0.0, {50, 1}), std::domain_error);
    CHECK_THROWS_AS(critical_value(1.0, {50, 1}), std::domain_error);
    CHECK_THROWS_AS(critical_value(-0.1, {50, 1}), std::domain_error);
    CHECK_THROWS_AS(critical_value(0.05, {19, 1}), std::domain_error);
}

TEST_CASE("penalty_constant realizes the three comparators") {
    CHECK(penalty_constant(PenaltyKind::cp, {50, 1}) == 2.0);
    CHECK(penalty_constant(PenaltyKind::cp, {1000000, 3}) == 2.0);
    CHECK(penalty_constant(PenaltyKind::bic, {1000, 1}) == Approx(std::log(1000.0)));
    CHECK(penalty_constant(PenaltyKind::bic, {1000, 1}) == Approx(6.9078).margin(1e-4));
    CHECK(penalty_constant(PenaltyKind::pvalue, {50, 1}, 0.05) == Approx(9.12).margin(0.01));
    CHECK_THROWS_AS(penalty_constant(PenaltyKind::pvalue, {10, 1}, 0.05), std::domain_error);
}

TEST_CASE("iterated_log") {
    CHECK(iterated_log(1000.0, 1) == Approx(std::log(1000.0)));
    CHECK(iterated_log(1000.0, 2) == Approx(std::log(std::log(1000.0))));
    CHECK(iterated_log(20.0, 3) == Approx(std::log(std::log(std::log(20.0)))));
    CHECK_THROWS_AS(iterated_log(2.0, 3), std::domain_error); // ln ln 2 < 0
}
