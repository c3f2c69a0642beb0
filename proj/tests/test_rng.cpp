#include <doctest.h>

#include <cmath>
#include <vector>

#include "tabf/rng.hpp"

using namespace tabf;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    // Reference vectors from the Random123 test suite.
    {
        const auto out = philox::block({0u, 0u, 0u, 0u}, {0u, 0u});
        CHECK(out[0] == 0x6627e8d5u);
        CHECK(out[1] == 0xe169c58du);
        CHECK(out[2] == 0xbc57ac4cu);
        CHECK(out[3] == 0x9b00dbd8u);
    }
    {
        const auto out = philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
        CHECK(out[0] == 0x408f276du);
        CHECK(out[1] == 0x41c83b0eu);
        CHECK(out[2] == 0xa20bc7c6u);
        CHECK(out[3] == 0x6d5451fdu);
    }
    {
        const auto out = philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                       {0xa4093822u, 0x299f31d0u});
        CHECK(out[0] == 0xd16cfe09u);
        CHECK(out[1] == 0x94fdccebu);
        CHECK(out[2] == 0x5001e420u);
        CHECK(out[3] == 0x24126ea1u);
    }
}

TEST_CASE("counter normals are a pure function of the address") {
    const NormalPair a = counter_normals(42, 3, 1000, 0);
    const NormalPair b = counter_normals(42, 3, 1000, 0);
    CHECK(a.z0 == b.z0);
    CHECK(a.z1 == b.z1);
    const NormalPair c = counter_normals(42, 4, 1000, 0);
    CHECK(a.z0 != c.z0);
    const NormalPair d = counter_normals(43, 3, 1000, 0);
    CHECK(a.z0 != d.z0);
}

TEST_CASE("counter normals have unit variance and zero mean") {
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const NormalPair p = counter_normals(7, static_cast<std::uint32_t>(k), 0, 0);
        sum += p.z0 + p.z1;
        sum_sq += p.z0 * p.z0 + p.z1 * p.z1;
    }
    const double mean = sum / (2.0 * n);
    const double var = sum_sq / (2.0 * n) - mean * mean;
    CHECK(std::abs(mean) < 5.0 / std::sqrt(2.0 * n));
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("uniform draws stay in [0,1)") {
    for (int k = 0; k < 1000; ++k) {
        const double u = counter_uniform(9, k, ~std::uint64_t{0}, 0);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
