#include <doctest.h>

#include <cmath>
#include <random>

#include "tabf/geometry.hpp"

using namespace tabf;

TEST_CASE("wrap maps onto [0,1)") {
    CHECK(wrap(1.25) == doctest::Approx(0.25));
    CHECK(wrap(-0.25) == doctest::Approx(0.75));
    CHECK(wrap(0.0) == 0.0);
    CHECK(wrap(1.0) == 0.0);
    CHECK(wrap(-3.0) == 0.0);
    CHECK_THROWS_AS(wrap(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(wrap(INFINITY), std::invalid_argument);
}

TEST_CASE("wrap is idempotent and 1-periodic") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double z = u(rng);
        const double w = wrap(z);
        CHECK(w >= 0.0);
        CHECK(w < 1.0);
        CHECK(wrap(w) == w);
        for (int k = -3; k <= 3; ++k) {
            CHECK(wrap(z + k) == doctest::Approx(w).epsilon(1e-12));
        }
    }
}

TEST_CASE("periodic_delta takes the short way around") {
    CHECK(periodic_delta(0.9, 0.1) == doctest::Approx(-0.2));
    CHECK(periodic_delta(0.1, 0.9) == doctest::Approx(0.2));
    CHECK(periodic_delta(0.3, 0.3) == 0.0);
}

TEST_CASE("periodic_delta antisymmetry away from the branch value") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = u(rng), b = u(rng);
        const double d = periodic_delta(a, b);
        CHECK(d >= -0.5);
        CHECK(d < 0.5);
        if (d > -0.5 + 1e-12) {
            CHECK(periodic_delta(b, a) == doctest::Approx(-d).epsilon(1e-12));
        }
    }
}

TEST_CASE("periodic quadrature on the unit torus") {
    SUBCASE("constant field integrates to 1") {
        std::vector<double> v(37, 1.0);
        CHECK(periodic_quadrature(v) == doctest::Approx(1.0));
    }
    SUBCASE("low-order harmonic vanishes") {
        std::vector<double> v(64);
        for (int k = 0; k < 64; ++k) v[k] = std::cos(2.0 * M_PI * (k + 0.5) / 64.0);
        CHECK(std::abs(periodic_quadrature(v)) < 1e-12);
    }
    SUBCASE("exp(cos) matches a dense reference rule") {
        auto rule = [](int n) {
            std::vector<double> v(n);
            for (int k = 0; k < n; ++k) v[k] = std::exp(std::cos(2.0 * M_PI * (k + 0.5) / n));
            return periodic_quadrature(v);
        };
        const double reference = rule(1000000);
        CHECK(rule(128) == doctest::Approx(reference).epsilon(1e-13));
        // the rule is spectrally accurate: even 32 points are converged
        CHECK(rule(32) == doctest::Approx(reference).epsilon(1e-13));
    }
    SUBCASE("empty grid is an error") {
        std::vector<double> v;
        CHECK_THROWS_AS(periodic_quadrature(v), std::invalid_argument);
    }
}

TEST_CASE("quadrature of a gradient component vanishes") {
    // d/dx of exp(sin(2 pi x)) sampled on the grid
    std::vector<double> v(256);
    for (int k = 0; k < 256; ++k) {
        const double x = (k + 0.5) / 256.0;
        v[k] = 2.0 * M_PI * std::cos(2.0 * M_PI * x) * std::exp(std::sin(2.0 * M_PI * x));
    }
    CHECK(std::abs(periodic_quadrature(v)) < 1e-12);
}

TEST_CASE("TorusPoint wraps components and fixes the dimension") {
    TorusPoint p({1.25, -0.25, 0.5});
    CHECK(p.dimension() == 3);
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == doctest::Approx(0.75));
    CHECK(p[2] == doctest::Approx(0.5));
    CHECK_THROWS_AS(TorusPoint(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("PeriodicGrid1D binning") {
    PeriodicGrid1D grid(64);
    CHECK(grid.width() == doctest::Approx(1.0 / 64));
    CHECK(grid.bin_of(0.0) == 0);
    CHECK(grid.bin_of(0.999999) == 63);
    CHECK(grid.bin_of(1.0) == 0);  // wraps
    CHECK(grid.bin_of(-0.0001) == 63);
    CHECK(grid.center(0) == doctest::Approx(0.5 / 64));
    for (int k = 0; k < 64; ++k) CHECK(grid.bin_of(grid.center(k)) == k);
    CHECK_THROWS_AS(PeriodicGrid1D(0), std::invalid_argument);
}
