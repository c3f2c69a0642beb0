#include <doctest.h>

#include <cmath>
#include <random>

#include "tabf/geometry.hpp"
#include "tabf/reaction_coordinates.hpp"

using namespace tabf;

TEST_CASE("coordinate values") {
    const auto p1 = ReactionCoordinate::projection(2, 0);
    CHECK(p1.value(TorusPoint{0.3, 0.7}) == doctest::Approx(0.3));
    const auto sum = ReactionCoordinate::integer_combination({1, 1});
    CHECK(sum.value(TorusPoint{0.6, 0.7}) == doctest::Approx(0.3));
    const auto diff = ReactionCoordinate::integer_combination({1, -1});
    CHECK(diff.value(TorusPoint{0.2, 0.5}) == doctest::Approx(0.7));
}

TEST_CASE("gradient data is constant and consistent with finite differences") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto coords = {ReactionCoordinate::projection(3, 1),
                         ReactionCoordinate::integer_combination({2, -1, 1})};
    for (const auto& rc : coords) {
        const auto grad = rc.gradient();
        double norm_sq = 0.0;
        for (double g : grad) norm_sq += g * g;
        CHECK(rc.grad_norm_sq() == doctest::Approx(norm_sq));
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> x = {u(rng), u(rng), u(rng)};
            for (int i = 0; i < 3; ++i) {
                const double step = 1e-6;
                std::vector<double> xp = x, xm = x;
                xp[i] += step;
                xm[i] -= step;
                // unwrap through periodic_delta so the branch cut is harmless
                const double fd = periodic_delta(rc.value(xp), rc.value(xm)) / (2.0 * step);
                CHECK(fd == doctest::Approx(grad[i]).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("local mean force, simplified form") {
    const auto spec = decoupled_double_well();
    SUBCASE("projection reduces to the plain partial derivative") {
        const auto rc = ReactionCoordinate::projection(2, 0);
        std::vector<double> x = {0.37, 0.81};
        CHECK(local_mean_force_simplified(rc, spec, x) ==
              doctest::Approx(spec.partial(x, 0)).epsilon(1e-12));
    }
    SUBCASE("(1,1) combination at the double-well slope point") {
        const auto rc = ReactionCoordinate::integer_combination({1, 1});
        std::vector<double> x = {0.125, 0.125};
        CHECK(local_mean_force_simplified(rc, spec, x) == doctest::Approx(-4.0 * M_PI));
    }
    SUBCASE("(2,0) halves the partial derivative") {
        const auto rc = ReactionCoordinate::integer_combination({2, 0});
        std::vector<double> x = {0.17, 0.62};
        CHECK(local_mean_force_simplified(rc, spec, x) ==
              doctest::Approx(spec.partial(x, 0) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("local mean force, cross-bias-corrected form") {
    const auto spec = decoupled_double_well();
    PeriodicGrid1D grid(16);
    const BiasFunction1D zero_bias(grid, std::vector<double>(16, 0.0));
    const BiasFunction1D unit_bias(grid, std::vector<double>(16, 1.0));

    SUBCASE("orthogonal projections make the correction vanish") {
        CoordinateSet coords({ReactionCoordinate::projection(2, 0),
                              ReactionCoordinate::projection(2, 1)});
        std::vector<double> x = {0.3, 0.9};
        CHECK(local_mean_force_coupled(0, unit_bias, coords, spec, x) ==
              doctest::Approx(spec.partial(x, 0)).epsilon(1e-12));
    }
    SUBCASE("zero bias reduces to the simplified form everywhere") {
        CoordinateSet coords({ReactionCoordinate::integer_combination({1, 1}),
                              ReactionCoordinate::projection(2, 1)});
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> x = {u(rng), u(rng)};
            CHECK(local_mean_force_coupled(0, zero_bias, coords, spec, x) ==
                  doctest::Approx(local_mean_force_simplified(coords.coord(0), spec, x))
                      .epsilon(1e-12));
        }
    }
    SUBCASE("unit bias derivative shifts by the gradient overlap") {
        CoordinateSet coords({ReactionCoordinate::integer_combination({1, 1}),
                              ReactionCoordinate::projection(2, 1)});
        std::vector<double> x = {0.11, 0.47};
        const double base = local_mean_force_simplified(coords.coord(0), spec, x);
        // grad xi2 . grad xi1 / |grad xi1|^2 = 1/2
        CHECK(local_mean_force_coupled(0, unit_bias, coords, spec, x) ==
              doctest::Approx(base - 0.5).epsilon(1e-12));
    }
    SUBCASE("needs exactly two coordinates") {
        CoordinateSet coords({ReactionCoordinate::projection(2, 0)});
        std::vector<double> x = {0.1, 0.1};
        CHECK_THROWS_AS(local_mean_force_coupled(0, zero_bias, coords, spec, x),
                        std::invalid_argument);
    }
}

TEST_CASE("gram matrix") {
    SUBCASE("orthonormal projections give the identity") {
        CoordinateSet coords({ReactionCoordinate::projection(2, 0),
                              ReactionCoordinate::projection(2, 1)});
        const auto g = gram_matrix(coords);
        CHECK(g[0] == doctest::Approx(1.0));
        CHECK(g[1] == doctest::Approx(0.0));
        CHECK(g[3] == doctest::Approx(1.0));
    }
    SUBCASE("(1,1) with projection(2)") {
        CoordinateSet coords({ReactionCoordinate::integer_combination({1, 1}),
                              ReactionCoordinate::projection(2, 1)});
        const auto g = gram_matrix(coords);
        CHECK(g[0] == doctest::Approx(2.0));
        CHECK(g[1] == doctest::Approx(1.0));
        CHECK(g[2] == doctest::Approx(1.0));
        CHECK(g[3] == doctest::Approx(1.0));
    }
    SUBCASE("degenerate pair is rejected") {
        CoordinateSet coords({ReactionCoordinate::projection(2, 0),
                              ReactionCoordinate::projection(2, 0)});
        CHECK_THROWS_AS(gram_matrix(coords), std::invalid_argument);
    }
    SUBCASE("positive definite for independent integer vectors") {
        CoordinateSet coords({ReactionCoordinate::integer_combination({2, 1}),
                              ReactionCoordinate::integer_combination({-1, 3})});
        const auto g = gram_matrix(coords);
        const double det = g[0] * g[3] - g[1] * g[2];
        CHECK(g[0] > 0.0);
        CHECK(det > 0.0);
        CHECK(g[1] == doctest::Approx(g[2]));
    }
}

TEST_CASE("mean force vector") {
    SUBCASE("projections collapse to the plain gradient") {
        const auto spec = coupled_double_well(0.5);
        CoordinateSet coords({ReactionCoordinate::projection(2, 0),
                              ReactionCoordinate::projection(2, 1)});
        std::vector<double> x = {0.21, 0.58};
        const auto f = mean_force_vector(coords, spec, x);
        CHECK(f[0] == doctest::Approx(spec.partial(x, 0)).epsilon(1e-12));
        CHECK(f[1] == doctest::Approx(spec.partial(x, 1)).epsilon(1e-12));
    }
    SUBCASE("constant potential gives the zero vector") {
        const auto spec = constant_potential(2);
        CoordinateSet coords({ReactionCoordinate::integer_combination({1, 1}),
                              ReactionCoordinate::projection(2, 1)});
        std::vector<double> x = {0.4, 0.9};
        const auto f = mean_force_vector(coords, spec, x);
        CHECK(f[0] == doctest::Approx(0.0));
        CHECK(f[1] == doctest::Approx(0.0));
    }
    SUBCASE("G^-1 contraction for a skew pair") {
        // xi1 = x1 + x2, xi2 = x2, V = cos(4 pi x1): solve G F = (grad xi . grad V)
        const auto spec = PotentialSpec(2, {{1.0, {2, 0}, {}}}, "cos4pix1");
        CoordinateSet coords({ReactionCoordinate::integer_combination({1, 1}),
                              ReactionCoordinate::projection(2, 1)});
        std::vector<double> x = {0.13, 0.77};
        const double dv = spec.partial(x, 0);
        // G = [[2,1],[1,1]], rhs = (dv, 0) -> F = (dv, -dv)
        const auto f = mean_force_vector(coords, spec, x);
        CHECK(f[0] == doctest::Approx(dv).epsilon(1e-12));
        CHECK(f[1] == doctest::Approx(-dv).epsilon(1e-12));
    }
}

TEST_CASE("coordinate set group validation") {
    auto p1 = ReactionCoordinate::projection(2, 0);
    auto p2 = ReactionCoordinate::projection(2, 1);
    CHECK_NOTHROW(CoordinateSet({p1, p2}, {{0}, {1}}));
    CHECK_NOTHROW(CoordinateSet({p1, p2}, {{0, 1}}));
    CHECK_THROWS_AS(CoordinateSet({p1, p2}, {{0}}), std::invalid_argument);
    CHECK_THROWS_AS(CoordinateSet({p1, p2}, {{0}, {0}}), std::invalid_argument);
    CHECK_THROWS_AS(CoordinateSet({p1, p2, p1, p2}, {{0, 1}, {2, 3}}), std::invalid_argument);
}
