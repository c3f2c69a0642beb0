#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tabf/abf_estimator.hpp"
#include "tabf/bias_function.hpp"
#include "tabf/geometry.hpp"
#include "tabf/reaction_coordinates.hpp"

namespace tabf {

// Free-energy values A(z1, z2) at bin centers, in units of k_B T, anchored
// so the minimum over visited bins is zero. Unvisited bins carry no value.
class FreeEnergySurface2D {
  public:
    FreeEnergySurface2D(PeriodicGrid1D grid1, PeriodicGrid1D grid2);

    const PeriodicGrid1D& grid1() const { return grid1_; }
    const PeriodicGrid1D& grid2() const { return grid2_; }
    int bins1() const { return grid1_.bins(); }
    int bins2() const { return grid2_.bins(); }
    int index(int k1, int k2) const { return k1 * grid2_.bins() + k2; }

    double& value(int k1, int k2) { return value_[index(k1, k2)]; }
    double value(int k1, int k2) const { return value_[index(k1, k2)]; }
    bool visited(int k1, int k2) const { return visited_[index(k1, k2)] != 0; }
    void set(int k1, int k2, double v);
    void mask(int k1, int k2);

    std::span<const double> values() const { return value_; }
    std::span<const std::uint8_t> visited_flags() const { return visited_; }
    int visited_count() const;

    // Shift values so the minimum over visited bins is zero.
    void anchor();

  private:
    PeriodicGrid1D grid1_;
    PeriodicGrid1D grid2_;
    std::vector<double> value_;
    std::vector<std::uint8_t> visited_;
};

// Per-bin mean of deposited mean-force vectors with sample counts.
struct GradientField2D {
    PeriodicGrid1D grid1{1};
    PeriodicGrid1D grid2{1};
    std::vector<double> f1;
    std::vector<double> f2;
    std::vector<long long> count;

    GradientField2D(PeriodicGrid1D g1, PeriodicGrid1D g2);
    int index(int k1, int k2) const { return k1 * grid2.bins() + k2; }
    bool visited(int k1, int k2) const { return count[index(k1, k2)] > 0; }
};

// Free energy from a joint histogram collected under frozen biases:
// A = -1/beta ln(count / total / cell_area) + A1(z1) + A2(z2), anchored,
// with zero-count bins masked.
FreeEnergySurface2D reconstruct_histogram(const JointHistogram2D& hist, const BiasFunction1D& a1,
                                          const BiasFunction1D& a2, double beta);

// Per-bin means of the deposited F samples.
GradientField2D estimate_gradient_field(const BiasGrid2D& f_samples);

struct GradientIntegrationReport {
    double curl_rms = 0.0;     // RMS of the discrete curl over visited plaquettes
    int cg_iterations = 0;
    double cg_residual = 0.0;
};

// Masked periodic least-squares integration of a gradient field: solves the
// discrete Poisson problem min_A sum_edges |D A - g|^2 over edges whose two
// cells are both visited, then anchors the surface. The visited region must
// be connected under 4-neighbor periodic adjacency.
FreeEnergySurface2D integrate_gradient_2d(const GradientField2D& field,
                                          GradientIntegrationReport* report = nullptr);

// Central-difference gradient of a fully visited surface, the down-map used
// by the projection-idempotence checks.
GradientField2D surface_gradient(const FreeEnergySurface2D& surface);

// Canonical average of phi from samples drawn under frozen biases:
// sum phi w / sum w with w = exp(-beta (A1(xi1(x)) + A2(xi2(x)))).
double unbiased_average(std::span<const double> xs_flat, std::span<const double> phi,
                        const BiasFunction1D& a1, const BiasFunction1D& a2,
                        const CoordinateSet& coords, double beta);

// Start a standard-ABF grid from an estimated gradient field (per-bin means
// and counts copied over).
BiasGrid2D seed_standard_abf(const GradientField2D& field);

}  // namespace tabf
