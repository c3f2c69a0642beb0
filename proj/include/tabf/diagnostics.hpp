#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tabf/oracle.hpp"
#include "tabf/potentials.hpp"

namespace tabf {

// Relative entropy int p ln(p/q) by periodic quadrature; p and q are
// density samples on the same uniform grid (any dimension, flattened).
// Cells with p = 0 contribute zero; q = 0 under positive p is an error.
double relative_entropy(std::span<const double> p, std::span<const double> q);

// Fisher information int |grad ln(p/q)|^2 p with periodic central
// differences, for densities on T (1D) and T^2.
double fisher_information_1d(std::span<const double> p, std::span<const double> q);
double fisher_information_2d(const DensityField2D& p, const DensityField2D& q);

struct CsiszarKullback {
    double l1 = 0.0;
    double bound = 0.0;
    bool ok = false;
};

// Both sides of the Csiszar-Kullback inequality int |p - q| <= sqrt(2 H).
CsiszarKullback csiszar_kullback_check(std::span<const double> p, std::span<const double> q);

struct LambdaRate {
    double lambda = 0.0;
    bool condition18 = false;  // rho1 rho2 >= beta^2 kappa1 kappa2
};

// The convergence-rate constant
//   lambda = (rho1 + rho2 - sqrt((rho1 - rho2)^2 + 4 k1 k2 / (rho1 rho2))) / 4
// evaluated with the beta-rescaled couplings k_a = beta kappa_a, plus the
// weak-coupling flag.
LambdaRate lambda_rate(double rho1, double rho2, double kappa1, double kappa2, double beta);

// Holley-Stroock lower bound on the logarithmic Sobolev constant of the
// conditional measures on the fibers of x_axis: 4 pi^2 exp(-beta osc),
// where osc is the largest oscillation of the potential along any fiber
// (dense scan). 4 pi^2 is the LSI constant of the uniform measure on the
// unit circle in the H <= I/(2 rho) convention.
double lsi_lower_bound_conditional(const PotentialSpec& spec, double beta, int axis,
                                   int scan_points = 2048);

struct DecayFit {
    double rate = 0.0;
    double r_squared = 0.0;
    int points = 0;
    double window_begin = 0.0;
    double window_end = 0.0;
};

// Least-squares slope of ln(value) against t over [t_begin, t_end],
// sign-flipped. Needs >= 10 positive points in the window.
DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> value, double t_begin,
                        double t_end);

struct ConvergenceReport {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double rho1_lb = 0.0;
    double rho2_lb = 0.0;
    double lambda_lb = 0.0;
    double r = 0.0;  // always 4 pi^2
    bool condition18 = false;
    std::map<std::string, DecayFit> fitted_rates;
};

// kappa, Holley-Stroock bounds and lambda for a potential on T^2.
ConvergenceReport diagnose_potential(const PotentialSpec& spec, double beta, int scan_points = 2048);

}  // namespace tabf
