#include "tabf/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tabf {

double wrap(double z) {
    if (!std::isfinite(z)) {
        throw std::invalid_argument("wrap: non-finite coordinate");
    }
    double w = z - std::floor(z);
    // z very slightly below an integer can round to exactly 1.0.
    if (w >= 1.0) w = 0.0;
    return w;
}

double periodic_delta(double a, double b) {
    return wrap(a - b + 0.5) - 0.5;
}

double periodic_quadrature(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("periodic_quadrature: empty grid");
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

TorusPoint::TorusPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) {
        throw std::invalid_argument("TorusPoint: dimension must be >= 1");
    }
    for (double& c : coords_) c = wrap(c);
}

TorusPoint::TorusPoint(std::initializer_list<double> coords)
    : TorusPoint(std::vector<double>(coords)) {}

PeriodicGrid1D::PeriodicGrid1D(int bins) : bins_(bins) {
    if (bins < 1) {
        throw std::invalid_argument("PeriodicGrid1D: bins must be >= 1, got " +
                                    std::to_string(bins));
    }
}

int PeriodicGrid1D::bin_of(double z) const {
    int k = static_cast<int>(wrap(z) * bins_);
    return k >= bins_ ? bins_ - 1 : k;
}

}  // namespace tabf
