#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tabf/bias_function.hpp"
#include "tabf/free_energy.hpp"
#include "tabf/geometry.hpp"
#include "tabf/potentials.hpp"

namespace tabf {

// Nonnegative grid function on T^2 normalized to unit integral.
class DensityField2D {
  public:
    DensityField2D(int bins1, int bins2, double fill = 1.0);

    int bins1() const { return bins1_; }
    int bins2() const { return bins2_; }
    int index(int k1, int k2) const { return k1 * bins2_ + k2; }
    double& at(int k1, int k2) { return values_[index(k1, k2)]; }
    double at(int k1, int k2) const { return values_[index(k1, k2)]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double quadrature() const;
    // Rescale to unit integral; throws if the integral is not positive.
    void normalize();
    // Marginal density along the given axis (0 or 1), values at bin centers.
    std::vector<double> marginal(int axis) const;

  private:
    int bins1_;
    int bins2_;
    std::vector<double> values_;
};

// Quadrature free-energy surface A(x1, x2) = -1/beta ln int exp(-beta V) dx_3..n
// at bin centers, anchored to min zero. Supports n in {2, 3}; refuses larger n.
FreeEnergySurface2D free_energy_2d(const PotentialSpec& spec, double beta, int bins,
                                   int quad_points = 0);

// Quadrature marginal free energy A^alpha at bin centers, anchored to min
// zero. Supports n <= 3.
BiasFunction1D free_energy_1d(const PotentialSpec& spec, int axis, double beta, int bins,
                              int quad_points = 0);

// Derivative of the marginal free energy: the canonical conditional mean of
// d_alpha V given x_alpha, at bin centers.
BiasFunction1D mean_force_1d(const PotentialSpec& spec, int axis, double beta, int bins,
                             int quad_points = 0);

// Canonical average of an observable under exp(-beta V)/Z by dense
// quadrature (n <= 3).
double canonical_average(const PotentialSpec& spec,
                         const std::function<double(std::span<const double>)>& observable,
                         double beta, int quad_points = 0);

// Solution of the stationary bias pair: positive grid functions rho1, rho2
// with int 1/rho1 = 1, and the derived bias potentials a = -1/beta ln rho.
struct StationaryPair {
    int bins = 0;
    double beta = 1.0;
    std::vector<double> rho1;
    std::vector<double> rho2;
    std::vector<double> a_inf1;
    std::vector<double> a_inf2;
    double residual = 0.0;
    int iterations = 0;

    // Joint stationary density exp(-beta(A - a1 - a2)) normalized; built
    // from the same anchored surface the solver consumed.
    DensityField2D stationary_density(const FreeEnergySurface2D& surface) const;
};

// Fixed-point iteration for the stationary pair on the bin-center
// discretization of the given free-energy surface. The iterate bounds
// a^2/b^2 <= rho <= b^2/a^2 are asserted every sweep.
StationaryPair solve_stationary_pair(const FreeEnergySurface2D& surface, double beta, double tol,
                                     int max_iter);
StationaryPair solve_stationary_pair(const PotentialSpec& spec, double beta, int bins, double tol,
                                     int max_iter);

struct FpOptions {
    int bins = 128;
    double beta = 1.0;
    double dt = 0.0;         // 0 selects 0.6 * stability bound
    double t_final = 0.1;
    bool adaptive = true;
    // Frozen bias potentials at bin centers (used when adaptive is false;
    // empty means zero bias).
    std::vector<double> frozen_bias1;
    std::vector<double> frozen_bias2;
    long long snapshot_every = 0;  // steps between observer calls; 0 = final only
    bool keep_snapshots = false;
};

struct FpSnapshot {
    double time = 0.0;
    long long step = 0;
    DensityField2D psi{1, 1};
    // Bias derivatives on cell faces, (A_t^alpha)'((k+1)/bins), size bins.
    std::vector<double> bias_prime1;
    std::vector<double> bias_prime2;
};

struct FpResult {
    double dt = 0.0;
    double stable_dt = 0.0;
    long long steps = 0;
    std::vector<FpSnapshot> snapshots;  // populated when keep_snapshots
    FpSnapshot final_state{};
};

// Explicit conservative finite-volume evolution of the adaptive
// Fokker-Planck system on T^2. Fluxes use the entropic (log-mean) form
// psi_face (beta^-1 d ln psi + dV - h p) / h, which conserves mass by
// telescoping, reduces the marginal dynamics to the exact discrete heat
// equation when the bias derivative is the density-weighted face quotient,
// and keeps the solved stationary pair an exact fixed point.
FpResult evolve_fokker_planck(const PotentialSpec& spec, const FpOptions& options,
                              const DensityField2D& initial,
                              const std::function<void(const FpSnapshot&)>& observer = {});

// Stability bound on dt for the explicit scheme (diffusion and drift).
double fp_stable_dt(const PotentialSpec& spec, int bins, double beta);

}  // namespace tabf
