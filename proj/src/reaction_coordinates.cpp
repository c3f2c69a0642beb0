#include "tabf/reaction_coordinates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tabf {

ReactionCoordinate::ReactionCoordinate(Kind kind, int axis, std::vector<int> coefficients,
                                       std::vector<double> gradient)
    : kind_(kind), axis_(axis), coefficients_(std::move(coefficients)),
      gradient_(std::move(gradient)) {
    for (double g : gradient_) grad_norm_sq_ += g * g;
    if (grad_norm_sq_ == 0.0) {
        throw std::invalid_argument("ReactionCoordinate: |grad xi| must be nonzero");
    }
}

ReactionCoordinate ReactionCoordinate::projection(int ambient_dimension, int axis) {
    if (ambient_dimension < 1 || axis < 0 || axis >= ambient_dimension) {
        throw std::invalid_argument("ReactionCoordinate::projection: axis out of range");
    }
    std::vector<double> grad(ambient_dimension, 0.0);
    grad[axis] = 1.0;
    return ReactionCoordinate(Kind::projection, axis, {}, std::move(grad));
}

ReactionCoordinate ReactionCoordinate::integer_combination(std::vector<int> coefficients) {
    if (coefficients.empty()) {
        throw std::invalid_argument("ReactionCoordinate::integer_combination: empty coefficients");
    }
    std::vector<double> grad(coefficients.begin(), coefficients.end());
    return ReactionCoordinate(Kind::integer_combination, -1, std::move(coefficients),
                              std::move(grad));
}

double ReactionCoordinate::value(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != ambient_dimension()) {
        throw std::invalid_argument("ReactionCoordinate::value: dimension mismatch");
    }
    if (kind_ == Kind::projection) return wrap(x[axis_]);
    double s = 0.0;
    for (int i = 0; i < ambient_dimension(); ++i) s += coefficients_[i] * x[i];
    return wrap(s);
}

std::string ReactionCoordinate::describe() const {
    if (kind_ == Kind::projection) return "projection(axis=" + std::to_string(axis_ + 1) + ")";
    std::string s = "integer_combination(";
    for (size_t i = 0; i < coefficients_.size(); ++i) {
        s += (i ? "," : "") + std::to_string(coefficients_[i]);
    }
    return s + ")";
}

CoordinateSet::CoordinateSet(std::vector<ReactionCoordinate> coords,
                             std::vector<std::vector<int>> groups)
    : coords_(std::move(coords)), groups_(std::move(groups)) {
    if (coords_.empty()) {
        throw std::invalid_argument("CoordinateSet: need at least one coordinate");
    }
    const int n = coords_.front().ambient_dimension();
    for (const auto& rc : coords_) {
        if (rc.ambient_dimension() != n) {
            throw std::invalid_argument("CoordinateSet: mixed ambient dimensions");
        }
    }
    if (groups_.empty()) {
        for (int i = 0; i < size(); ++i) groups_.push_back({i});
    }
    std::vector<bool> seen(coords_.size(), false);
    int pairs = 0;
    for (const auto& g : groups_) {
        if (g.size() != 1 && g.size() != 2) {
            throw std::invalid_argument("CoordinateSet: groups must be singletons or one pair");
        }
        if (g.size() == 2) ++pairs;
        for (int i : g) {
            if (i < 0 || i >= size() || seen[i]) {
                throw std::invalid_argument("CoordinateSet: groups must partition the coordinates");
            }
            seen[i] = true;
        }
    }
    for (bool s : seen) {
        if (!s) throw std::invalid_argument("CoordinateSet: groups must cover every coordinate");
    }
    if (pairs > 1) {
        throw std::invalid_argument("CoordinateSet: at most one paired group is supported");
    }
}

CoordinateSet::CoordinateSet(std::vector<ReactionCoordinate> coords)
    : CoordinateSet(std::move(coords), {}) {}

double local_mean_force_simplified(const ReactionCoordinate& rc, const PotentialSpec& spec,
                                   std::span<const double> x) {
    if (rc.ambient_dimension() != spec.dimension()) {
        throw std::invalid_argument("local_mean_force_simplified: dimension mismatch");
    }
    std::vector<double> grad_v(spec.dimension());
    spec.gradient(x, grad_v);
    double dot = 0.0;
    const auto g = rc.gradient();
    for (int i = 0; i < rc.ambient_dimension(); ++i) dot += grad_v[i] * g[i];
    return dot / rc.grad_norm_sq();
}

double local_mean_force_coupled(int alpha, const BiasFunction1D& other_bias_prime,
                                const CoordinateSet& coords, const PotentialSpec& spec,
                                std::span<const double> x) {
    if (coords.size() != 2) {
        throw std::invalid_argument("local_mean_force_coupled: needs exactly two coordinates");
    }
    const int other = 1 - alpha;
    const ReactionCoordinate& rc = coords.coord(alpha);
    const ReactionCoordinate& rc_other = coords.coord(other);
    std::vector<double> grad_v(spec.dimension());
    spec.gradient(x, grad_v);
    const double bias_prime = other_bias_prime(rc_other.value(x));
    double dot = 0.0;
    const auto ga = rc.gradient();
    const auto go = rc_other.gradient();
    for (int i = 0; i < rc.ambient_dimension(); ++i) {
        dot += (grad_v[i] - bias_prime * go[i]) * ga[i];
    }
    return dot / rc.grad_norm_sq();
}

std::array<double, 4> gram_matrix(const CoordinateSet& coords) {
    if (coords.size() != 2) {
        throw std::invalid_argument("gram_matrix: needs exactly two coordinates");
    }
    const auto g1 = coords.coord(0).gradient();
    const auto g2 = coords.coord(1).gradient();
    double g11 = 0.0, g12 = 0.0, g22 = 0.0;
    for (size_t i = 0; i < g1.size(); ++i) {
        g11 += g1[i] * g1[i];
        g12 += g1[i] * g2[i];
        g22 += g2[i] * g2[i];
    }
    const double det = g11 * g22 - g12 * g12;
    if (std::abs(det) < 1e-12) {
        throw std::invalid_argument("gram_matrix: coordinate gradients are linearly dependent");
    }
    return {g11, g12, g12, g22};
}

std::array<double, 2> mean_force_vector(const CoordinateSet& coords, const PotentialSpec& spec,
                                        std::span<const double> x) {
    const auto g = gram_matrix(coords);
    const double det = g[0] * g[3] - g[1] * g[2];
    // Closed-form 2x2 inverse; the divergence term is zero (constant G).
    const double inv00 = g[3] / det, inv01 = -g[1] / det, inv11 = g[0] / det;
    std::vector<double> grad_v(spec.dimension());
    spec.gradient(x, grad_v);
    const auto g1 = coords.coord(0).gradient();
    const auto g2 = coords.coord(1).gradient();
    double d1 = 0.0, d2 = 0.0;
    for (size_t i = 0; i < g1.size(); ++i) {
        d1 += g1[i] * grad_v[i];
        d2 += g2[i] * grad_v[i];
    }
    return {inv00 * d1 + inv01 * d2, inv01 * d1 + inv11 * d2};
}

}  // namespace tabf
