#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include <swv/errors.hpp>
#include <swv/expm.hpp>

#include "oracles.hpp"

using swv::Mat;
using swv::Vec;

TEST_CASE("exponential of simple matrices", "[expm]") {
    REQUIRE((swv::expm(Mat(2, 2)) - Mat::identity(2)).max_abs() == 0.0);

    const Mat diag{{-1.0, 0.0}, {0.0, 2.0}};
    const Mat e = swv::expm(diag, 0.5);
    REQUIRE(e(0, 0) == Catch::Approx(std::exp(-0.5)).epsilon(1e-14));
    REQUIRE(e(1, 1) == Catch::Approx(std::exp(1.0)).epsilon(1e-14));
    REQUIRE(e(0, 1) == 0.0);

    // Nilpotent: exp([[0,1],[0,0]] t) = [[1,t],[0,1]].
    const Mat shift{{0.0, 1.0}, {0.0, 0.0}};
    const Mat n = swv::expm(shift, 3.25);
    REQUIRE(n(0, 0) == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(n(0, 1) == Catch::Approx(3.25).epsilon(1e-14));
    REQUIRE(n(1, 0) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(n(1, 1) == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("rotation blocks exponentiate to rotations", "[expm]") {
    const double w = 1.7;
    const Mat gen{{0.0, -w}, {w, 0.0}};
    for (double t : {0.1, 1.0, 2.5, 10.0}) {
        const Mat r = swv::expm(gen, t);
        REQUIRE(r(0, 0) == Catch::Approx(std::cos(w * t)).margin(1e-13));
        REQUIRE(r(0, 1) == Catch::Approx(-std::sin(w * t)).margin(1e-13));
        REQUIRE(r(1, 0) == Catch::Approx(std::sin(w * t)).margin(1e-13));
        REQUIRE(r(1, 1) == Catch::Approx(std::cos(w * t)).margin(1e-13));
    }
}

TEST_CASE("semigroup and inverse identities", "[expm]") {
    swv::SplitMix64 rng(7301);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t d = 2 + rng.below(3);
        const Mat a = oracles::random_matrix(rng, d, -1.5, 1.5);

        const Mat whole = swv::expm(a, 1.7);
        const Mat split = swv::expm(a, 1.0) * swv::expm(a, 0.7);
        REQUIRE((whole - split).max_abs() < 1e-12 * std::max(1.0, whole.max_abs()));

        const Mat round_trip = swv::expm(a, 0.9) * swv::expm(a, -0.9);
        REQUIRE((round_trip - Mat::identity(d)).max_abs() < 1e-12);
    }
}

TEST_CASE("determinant of the exponential equals exp of the trace", "[expm]") {
    swv::SplitMix64 rng(7302);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t d = 2 + rng.below(3);
        const Mat a = oracles::random_matrix(rng, d, -1.0, 1.0);
        const double det = swv::determinant(swv::expm(a));
        REQUIRE(det == Catch::Approx(std::exp(a.trace())).epsilon(1e-10));
    }
}

TEST_CASE("exponential action agrees with adaptive integration", "[expm]") {
    swv::SplitMix64 rng(7303);
    // Spread the scaled norms across the degree ladder and into the
    // scaling-and-squaring regime.
    for (double scale : {0.01, 0.2, 0.8, 1.8, 4.0, 20.0}) {
        const std::size_t d = 2 + rng.below(3);
        Mat a = oracles::random_matrix(rng, d);
        a = a * (scale / std::max(a.one_norm(), 1e-12));
        const Vec x0 = oracles::random_vec(rng, d);

        const Vec via_expm = swv::expm(a, 1.0) * x0;
        const Vec via_rk = oracles::rk45_linear(a, x0, 1.0);
        const double ref = std::max(swv::norm2(via_rk), 1e-12);
        Vec diff(d);
        for (std::size_t i = 0; i < d; ++i) diff[i] = via_expm[i] - via_rk[i];
        REQUIRE(swv::norm2(diff) <= 1e-8 * ref);
    }
}

TEST_CASE("non-finite input and overflowing output are rejected", "[expm]") {
    Mat bad = Mat::identity(2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(swv::expm(bad), swv::Error);

    const Mat huge{{1000.0, 0.0}, {0.0, 1000.0}};
    REQUIRE_THROWS_AS(swv::expm(huge), swv::OverflowError);
}
