#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ilmm/errors.hpp"
#include "ilmm/normal.hpp"
#include "ilmm/pricing.hpp"
#include "ilmm/rng.hpp"

using namespace ilmm;
using Catch::Approx;

TEST_CASE("normal CDF matches the 40-digit oracle to 1e-15 absolute") {
    // reference values computed with erfc at 40-digit precision
    const struct { double x, phi; } table[] = {
        {-8.0, 6.220960574271784e-16},
        {-5.0, 2.866515718791939e-07},
        {-2.5, 0.006209665325776135},
        {-1.0, 0.15865525393145705},
        {-0.5, 0.3085375387259869},
        {-0.005, 0.49800529690925918},
        {0.0, 0.5},
        {0.005, 0.50199470309074082},
        {0.3, 0.61791142218895264},
        {1.0, 0.84134474606854293},
        {1.959963984540054, 0.97499999999999999},
        {3.0, 0.99865010196836991},
        {5.0, 0.99999971334842812},
        {8.0, 0.99999999999999938},
    };
    for (const auto& row : table)
        CHECK(std::fabs(norm_cdf(row.x) - row.phi) < 1e-15);
}

TEST_CASE("inverse CDF round-trips through the CDF") {
    for (double p : {1e-10, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.975, 1.0 - 1e-6}) {
        const double x = norm_inv(p);
        CHECK(norm_cdf(x) == Approx(p).epsilon(1e-12));
    }
    CHECK(norm_inv(0.5) == 0.0);
    CHECK_THROWS_AS(norm_inv(0.0), ModelError);
    CHECK_THROWS_AS(norm_inv(1.0), ModelError);
}

TEST_CASE("philox draws are deterministic and antithetic-free") {
    double a0, a1, b0, b1;
    normal_pair(42, 7, 3, 0, a0, a1);
    normal_pair(42, 7, 3, 0, b0, b1);
    CHECK(a0 == b0);
    CHECK(a1 == b1);
    normal_pair(43, 7, 3, 0, b0, b1);
    CHECK(a0 != b0);
    normal_pair(42, 8, 3, 0, b0, b1);
    CHECK(a0 != b0);
}

TEST_CASE("philox normals have the right first moments") {
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double z0, z1;
        normal_pair(123, static_cast<std::uint64_t>(i), 0, 0, z0, z1);
        sum += z0 + z1;
        sum2 += z0 * z0 + z1 * z1;
    }
    CHECK(sum / (2 * n) == Approx(0.0).margin(0.005));
    CHECK(sum2 / (2 * n) == Approx(1.0).margin(0.01));
}

TEST_CASE("displaced Black limits and symmetry") {
    SECTION("zero vol returns intrinsic") {
        CHECK(black_call(1.03, 1.02, 0.0) == Approx(0.01).epsilon(1e-15));
        CHECK(black_put(1.03, 1.02, 0.0) == 0.0);
        CHECK(black_put(1.01, 1.02, 0.0) == Approx(0.01).epsilon(1e-15));
    }
    SECTION("at-the-money value is F(2 Phi(s/2) - 1)") {
        // s = 0.01: 2 Phi(0.005) - 1 from the high-precision oracle
        const double f = 1.025;
        CHECK(black_call(f, f, 0.01) ==
              Approx(f * 0.0039894061814816446).epsilon(1e-13));
    }
    SECTION("call-put parity") {
        std::mt19937_64 gen(99);
        std::uniform_real_distribution<double> uf(0.2, 2.0), us(0.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            const double f = uf(gen), k = uf(gen), s = us(gen);
            CHECK(black_call(f, k, s) - black_put(f, k, s) == Approx(f - k).margin(1e-13));
        }
    }
    SECTION("monotone in vol and bounded") {
        double prev = black_call(1.02, 1.03, 0.0);
        for (double s = 0.01; s < 1.0; s += 0.05) {
            const double v = black_call(1.02, 1.03, s);
            CHECK(v >= prev);
            CHECK(v <= 1.02);
            prev = v;
        }
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(black_call(-1.0, 1.0, 0.1), ModelError);
        CHECK_THROWS_AS(black_call(1.0, 1.0, -0.1), ModelError);
    }
}
