#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "tabf/bias_function.hpp"
#include "tabf/geometry.hpp"
#include "tabf/potentials.hpp"

namespace tabf {

// Torus-valued coordinate T^n -> T with constant gradient: either a plain
// projection x -> x_i or an integer linear combination x -> wrap(sum c_i x_i).
// Constant |grad| makes every divergence correction in the local-mean-force
// formulas vanish identically.
class ReactionCoordinate {
  public:
    enum class Kind { projection, integer_combination };

    static ReactionCoordinate projection(int ambient_dimension, int axis);
    static ReactionCoordinate integer_combination(std::vector<int> coefficients);

    Kind kind() const { return kind_; }
    int ambient_dimension() const { return static_cast<int>(gradient_.size()); }
    int axis() const { return axis_; }  // projections only
    const std::vector<int>& coefficients() const { return coefficients_; }

    double value(std::span<const double> x) const;
    double value(const TorusPoint& x) const { return value(x.coords()); }

    // The gradient is constant over T^n.
    std::span<const double> gradient() const { return gradient_; }
    double grad_norm_sq() const { return grad_norm_sq_; }

    std::string describe() const;

  private:
    ReactionCoordinate(Kind kind, int axis, std::vector<int> coefficients,
                       std::vector<double> gradient);

    Kind kind_;
    int axis_ = -1;
    std::vector<int> coefficients_;
    std::vector<double> gradient_;
    double grad_norm_sq_ = 0.0;
};

// An ordered list of reaction coordinates partitioned into singleton
// groups plus at most one paired group.
class CoordinateSet {
  public:
    CoordinateSet(std::vector<ReactionCoordinate> coords, std::vector<std::vector<int>> groups);
    // All-singleton convenience.
    explicit CoordinateSet(std::vector<ReactionCoordinate> coords);

    int size() const { return static_cast<int>(coords_.size()); }
    int ambient_dimension() const { return coords_.front().ambient_dimension(); }
    const ReactionCoordinate& coord(int i) const { return coords_[i]; }
    const std::vector<std::vector<int>>& groups() const { return groups_; }

  private:
    std::vector<ReactionCoordinate> coords_;
    std::vector<std::vector<int>> groups_;
};

// f = grad V . grad xi / |grad xi|^2; the divergence correction is zero
// for the constant-|grad| coordinates supported here.
double local_mean_force_simplified(const ReactionCoordinate& rc, const PotentialSpec& spec,
                                   std::span<const double> x);

// Cross-bias-corrected local mean force for a two-coordinate set:
// f_alpha = [grad V - A'_other(xi_other) grad xi_other] . grad xi_alpha / |grad xi_alpha|^2.
// `other_bias_prime` evaluates the other coordinate's bias derivative.
double local_mean_force_coupled(int alpha, const BiasFunction1D& other_bias_prime,
                                const CoordinateSet& coords, const PotentialSpec& spec,
                                std::span<const double> x);

// Gram matrix G_{ab} = grad xi_a . grad xi_b for a two-coordinate set
// (constant over T^n for the supported coordinates). Throws when the two
// gradients are linearly dependent (|det| < 1e-12).
std::array<double, 4> gram_matrix(const CoordinateSet& coords);

// Two-component mean-force vector F_a = sum_g Ginv_{ag} grad xi_g . grad V;
// the divergence term vanishes because G and the gradients are constant.
std::array<double, 2> mean_force_vector(const CoordinateSet& coords, const PotentialSpec& spec,
                                        std::span<const double> x);

}  // namespace tabf
