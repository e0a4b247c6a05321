#include "stoptree/normal.hpp"

#include <catch2/catch.hpp>

#include <cmath>

using namespace stoptree;

namespace {

// Reference values evaluated with 40-digit arithmetic and frozen.
struct CdfRef {
    double x;
    double phi;
};
constexpr CdfRef kCdfTable[] = {
    {-10.0, 7.6198530241605261e-24},
    {-8.0, 6.2209605742717841e-16},
    {-5.0, 2.8665157187919391e-7},
    {-3.0, 0.0013498980316300945},
    {-2.0, 0.022750131948179207},
    {-1.0, 0.15865525393145705},
    {-0.5, 0.30853753872598690},
    {-0.1, 0.46017216272297102},
    {0.5, 0.69146246127401310},
    {1.0, 0.84134474606854295},
    {1.959963984540054, 0.975},
    {2.5, 0.99379033467422386},
    {3.0, 0.99865010196836991},
    {5.0, 0.99999971334842812},
    {8.0, 0.99999999999999938},
};

struct QuantRef {
    double q;
    double z;
};
constexpr QuantRef kQuantTable[] = {
    {0.001, -3.0902323061678135},
    {0.01, -2.3263478740408411},
    {0.025, -1.9599639845400542},
    {0.1, -1.2815515655446005},
    {0.25, -0.67448975019608174},
    {0.6, 0.2533471031357998},
    {0.9, 1.2815515655446005},
    {0.975, 1.9599639845400542},
    {0.99, 2.3263478740408411},
    {0.9999, 3.7190164854556806},
};

} // namespace

TEST_CASE("normal cdf matches reference values") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    for (const auto& ref : kCdfTable) {
        CHECK(std_normal_cdf(ref.x) == Approx(ref.phi).epsilon(1e-13).margin(1e-300));
        CHECK(std::fabs(std_normal_cdf(ref.x) - ref.phi) <= 1e-12);
    }
}

TEST_CASE("normal cdf symmetry") {
    for (double x : {0.1, 0.7, 1.3, 2.9, 4.4}) {
        CHECK(std_normal_cdf(x) + std_normal_cdf(-x) == Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("normal quantile matches reference values") {
    CHECK(std_normal_quantile(0.5) == Approx(0.0).margin(1e-14));
    CHECK(std_normal_quantile(0.975) == Approx(1.959964).margin(1e-5));
    CHECK(std_normal_quantile(0.999597) == Approx(3.35).margin(0.01));
    for (const auto& ref : kQuantTable) {
        CHECK(std_normal_quantile(ref.q) == Approx(ref.z).epsilon(1e-12));
    }
}

TEST_CASE("normal quantile round trip through the cdf") {
    // |Phi(Phi^-1(q)) - q| <= 1e-10 across the whole domain, including tails.
    for (double q = 1e-12; q < 1.0; q = q < 0.1 ? q * 3.7 : q + 0.037) {
        const double z = std_normal_quantile(q);
        CHECK(std::fabs(std_normal_cdf(z) - q) <= 1e-10);
    }
    for (double q : {1e-300, 1e-200, 1e-50, 1.0 - 1e-12, 1.0 - 1e-15}) {
        const double z = std_normal_quantile(q);
        CHECK(std::isfinite(z));
        CHECK(std::fabs(std_normal_cdf(z) - q) <= 1e-10);
    }
}

TEST_CASE("normal quantile rejects arguments outside (0,1)") {
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(-0.2), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.7), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(std::nan("")), std::domain_error);
}
