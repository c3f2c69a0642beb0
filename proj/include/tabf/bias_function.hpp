#pragma once

#include <vector>

#include "tabf/geometry.hpp"

namespace tabf {

// Piecewise-constant function on T tabulated at bin centers. Used for both
// bias potentials A(z) and their derivatives A'(z); evaluation looks up
// the bin of z, with no interpolation.
struct BiasFunction1D {
    PeriodicGrid1D grid{1};
    std::vector<double> values;

    BiasFunction1D() = default;
    BiasFunction1D(PeriodicGrid1D g, std::vector<double> v) : grid(g), values(std::move(v)) {}

    double operator()(double z) const { return values[grid.bin_of(z)]; }
    int bins() const { return grid.bins(); }
};

}  // namespace tabf
