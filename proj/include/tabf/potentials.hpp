#pragma once

#include <span>
#include <string>
#include <vector>

#include "tabf/geometry.hpp"

namespace tabf {

// One product term c * prod_i cos(2*pi*k_i*x_i + phi_i). Integer wave
// vectors keep every term exactly 1-periodic.
struct CosineTerm {
    double amplitude = 0.0;
    std::vector<int> wavevector;
    std::vector<double> phase;  // empty means all zero
};

// Analytic periodic potential V: T^n -> R given as a finite sum of cosine
// products, with exact gradient and mixed second derivatives.
class PotentialSpec {
  public:
    PotentialSpec(int dimension, std::vector<CosineTerm> terms, std::string label);

    int dimension() const { return dimension_; }
    const std::string& label() const { return label_; }
    const std::vector<CosineTerm>& terms() const { return terms_; }

    double evaluate(std::span<const double> x) const;
    double evaluate(const TorusPoint& x) const { return evaluate(x.coords()); }

    void gradient(std::span<const double> x, std::span<double> out) const;
    std::vector<double> gradient(const TorusPoint& x) const;

    double partial(std::span<const double> x, int axis) const;
    // d^2 V / dx_i dx_j for i != j, from the closed-form term derivatives.
    double mixed_second(std::span<const double> x, int i, int j) const;

    // True when some term couples x_axis to another coordinate.
    bool mixes(int axis) const;

    // Largest |gradient component| over all terms (sum of |c·2πk|), used
    // for step-size safety bounds.
    double gradient_bound() const;

  private:
    void check_dimension(std::span<const double> x) const;

    int dimension_;
    std::vector<CosineTerm> terms_;
    std::string label_;
};

// Standard families used throughout the experiments. All live on T^2.
PotentialSpec constant_potential(int dimension);
// V(x1,x2) = cos(4 pi x1) + cos(4 pi x2): two independent double wells.
PotentialSpec decoupled_double_well();
// Decoupled double well plus eps_c * cos(2 pi (x1 - x2)).
PotentialSpec coupled_double_well(double eps_c);
// Half-depth double wells with a deep valley along the diagonal x1 = x2:
// 0.5 cos(4 pi x1) + 0.5 cos(4 pi x2) - kappa_c cos(2 pi (x1 - x2)).
PotentialSpec diagonal_channel(double kappa_c);

// Build one of the named families from a label and parameter.
PotentialSpec potential_from_family(const std::string& family, double parameter);

struct CouplingConstants {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
};

// Sup over a probe grid of the Euclidean norm of the mixed second
// derivative vectors (grad_{x_other} d_{x_alpha} V); exact zeros when no
// term mixes the axis. Lower bound on the true sup norm, converging as
// the probe grid refines.
CouplingConstants coupling_constants(const PotentialSpec& spec, int probe_bins);

}  // namespace tabf
