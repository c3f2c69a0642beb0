#include <doctest.h>

#include <cmath>
#include <random>

#include "tabf/potentials.hpp"

using namespace tabf;

namespace {

// Central finite differences of evaluate, the reference for every
// analytic-gradient check.
std::vector<double> fd_gradient(const PotentialSpec& spec, std::vector<double> x,
                                double step = 1e-5) {
    std::vector<double> g(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + step;
        const double up = spec.evaluate(x);
        x[i] = keep - step;
        const double dn = spec.evaluate(x);
        x[i] = keep;
        g[i] = (up - dn) / (2.0 * step);
    }
    return g;
}

std::vector<PotentialSpec> registered_specs() {
    std::vector<PotentialSpec> specs;
    specs.push_back(decoupled_double_well());
    specs.push_back(coupled_double_well(0.5));
    specs.push_back(coupled_double_well(1.0));
    specs.push_back(diagonal_channel(1.0));
    specs.push_back(PotentialSpec(
        3, {{0.7, {1, 2, -1}, {0.0, 0.3, 1.1}}, {-0.4, {0, 1, 1}, {}}, {0.2, {3, 0, 0}, {0.5, 0, 0}}},
        "mixed_3d"));
    return specs;
}

}  // namespace

TEST_CASE("family values at landmark points") {
    const auto dw = decoupled_double_well();
    CHECK(dw.evaluate(TorusPoint{0.0, 0.0}) == doctest::Approx(2.0));
    CHECK(dw.evaluate(TorusPoint{0.25, 0.25}) == doctest::Approx(-2.0));
    const auto cw = coupled_double_well(0.5);
    CHECK(cw.evaluate(TorusPoint{0.0, 0.0}) == doctest::Approx(2.5));
    // cos(4 pi x1) derivative at x1 = 1/8 is -4 pi
    const auto g = dw.gradient(TorusPoint{0.125, 0.0});
    CHECK(g[0] == doctest::Approx(-4.0 * M_PI));
    CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gradient vanishes at critical points of every term") {
    const auto dw = decoupled_double_well();
    for (double x1 : {0.0, 0.25, 0.5, 0.75}) {
        for (double x2 : {0.0, 0.25, 0.5, 0.75}) {
            const auto g = dw.gradient(TorusPoint{x1, x2});
            CHECK(std::abs(g[0]) < 1e-10);
            CHECK(std::abs(g[1]) < 1e-10);
        }
    }
}

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& spec : registered_specs()) {
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> x(spec.dimension());
            for (auto& c : x) c = u(rng);
            const auto fd = fd_gradient(spec, x);
            std::vector<double> an(spec.dimension());
            spec.gradient(x, an);
            for (int i = 0; i < spec.dimension(); ++i) {
                const double scale = std::max(1.0, std::abs(fd[i]));
                CHECK(std::abs(an[i] - fd[i]) / scale < 1e-6);
            }
        }
    }
}

TEST_CASE("evaluate is invariant under integer coordinate shifts") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& spec : registered_specs()) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> x(spec.dimension());
            for (auto& c : x) c = u(rng);
            const double v = spec.evaluate(x);
            std::vector<double> shifted = x;
            shifted[trial % spec.dimension()] += 1.0 + (trial % 3);
            CHECK(spec.evaluate(shifted) == doctest::Approx(v).epsilon(1e-12));
        }
    }
}

TEST_CASE("mixed second derivatives match finite differences of the gradient") {
    const auto cw = coupled_double_well(0.7);
    std::vector<double> x = {0.13, 0.81};
    const double step = 1e-6;
    std::vector<double> xp = x, xm = x;
    xp[1] += step;
    xm[1] -= step;
    const double fd = (cw.partial(xp, 0) - cw.partial(xm, 0)) / (2.0 * step);
    CHECK(cw.mixed_second(x, 0, 1) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("coupling constants") {
    SUBCASE("decoupled family is exactly zero") {
        const auto k = coupling_constants(decoupled_double_well(), 64);
        CHECK(k.kappa1 == 0.0);
        CHECK(k.kappa2 == 0.0);
    }
    SUBCASE("zero coupling amplitude reduces to decoupled") {
        const auto k = coupling_constants(coupled_double_well(0.0), 64);
        CHECK(k.kappa1 == 0.0);
        CHECK(k.kappa2 == 0.0);
    }
    SUBCASE("coupled_double_well(0.5) attains eps (2 pi)^2") {
        // |d2V/dx1 dx2| = eps (2 pi)^2 |cos(2 pi (x1 - x2))|, maximal on the
        // diagonal, which bin centers hit exactly.
        const auto k = coupling_constants(coupled_double_well(0.5), 128);
        const double expected = 0.5 * 4.0 * M_PI * M_PI;
        CHECK(k.kappa1 == doctest::Approx(expected).epsilon(1e-12));
        CHECK(k.kappa2 == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("n < 2 is rejected") {
        PotentialSpec one_d(1, {{1.0, {1}, {}}}, "1d");
        CHECK_THROWS_AS(coupling_constants(one_d, 32), std::invalid_argument);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const auto dw = decoupled_double_well();
    std::vector<double> x = {0.1, 0.2, 0.3};
    CHECK_THROWS_AS(dw.evaluate(x), std::invalid_argument);
    std::vector<double> g(3);
    CHECK_THROWS_AS(dw.gradient(x, g), std::invalid_argument);
}

TEST_CASE("family registry by label") {
    CHECK(potential_from_family("decoupled_double_well", 0.0).label() == "decoupled_double_well");
    CHECK(potential_from_family("coupled_double_well", 0.25).dimension() == 2);
    CHECK_THROWS_AS(potential_from_family("no_such_family", 0.0), std::invalid_argument);
}
