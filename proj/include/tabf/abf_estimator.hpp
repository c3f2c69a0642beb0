#pragma once

#include <cstdint>
#include <vector>

#include "tabf/bias_function.hpp"
#include "tabf/geometry.hpp"

namespace tabf {

// Running conditional-mean force estimate on a 1D periodic grid: per-bin
// sample tally and force sum, mean = sum / count.
class BiasGrid1D {
  public:
    explicit BiasGrid1D(PeriodicGrid1D grid);

    const PeriodicGrid1D& grid() const { return grid_; }
    int bins() const { return grid_.bins(); }

    void deposit(double z, double sample);
    double mean(int bin) const;
    long long count(int bin) const { return count_[bin]; }
    long long total_count() const;

    // Ramped bias derivative at z: min(1, count/ramp_threshold) * mean.
    // ramp_threshold = 0 disables the ramp.
    double bias_derivative(double z, long long ramp_threshold) const;

    // Count-weighted average of bin means; expected near zero once a
    // periodic coordinate is converged.
    double periodicity_residual() const;

    void clear();
    void merge(const BiasGrid1D& other);

    // Trapezoid integration of the bin means into bias potential values at
    // bin centers, after removing the mean of bin means (periodicity) and
    // shifting the minimum to zero. Throws if any bin is empty.
    BiasFunction1D integrate_bias() const;

    // Direct access for serialization and preloading.
    const std::vector<long long>& counts() const { return count_; }
    const std::vector<double>& force_sums() const { return force_sum_; }
    void load(std::vector<long long> counts, std::vector<double> force_sums);

  private:
    PeriodicGrid1D grid_;
    std::vector<long long> count_;
    std::vector<double> force_sum_;
};

// Same bookkeeping for a paired coordinate group: per-bin tallies of the
// two-component mean-force vector F on a (z1, z2) grid.
class BiasGrid2D {
  public:
    BiasGrid2D(PeriodicGrid1D grid1, PeriodicGrid1D grid2);

    const PeriodicGrid1D& grid1() const { return grid1_; }
    const PeriodicGrid1D& grid2() const { return grid2_; }
    int bins1() const { return grid1_.bins(); }
    int bins2() const { return grid2_.bins(); }
    int index(int k1, int k2) const { return k1 * grid2_.bins() + k2; }

    void deposit(double z1, double z2, double f1, double f2);
    long long count(int k1, int k2) const { return count_[index(k1, k2)]; }
    double mean1(int k1, int k2) const;
    double mean2(int k1, int k2) const;
    long long total_count() const;

    // Ramped per-bin mean vector at (z1, z2).
    void bias_force(double z1, double z2, long long ramp_threshold, double& f1, double& f2) const;

    void clear();
    void merge(const BiasGrid2D& other);

    const std::vector<long long>& counts() const { return count_; }
    const std::vector<double>& force_sums1() const { return force_sum1_; }
    const std::vector<double>& force_sums2() const { return force_sum2_; }
    void load(std::vector<long long> counts, std::vector<double> sums1, std::vector<double> sums2);

  private:
    PeriodicGrid1D grid1_;
    PeriodicGrid1D grid2_;
    std::vector<long long> count_;
    std::vector<double> force_sum1_;
    std::vector<double> force_sum2_;
};

// Plain (z1, z2) visit tally, the histogram of Eq-style reconstruction
// runs. Counts are doubles so oracle-built expected histograms fit too.
class JointHistogram2D {
  public:
    JointHistogram2D(PeriodicGrid1D grid1, PeriodicGrid1D grid2);

    const PeriodicGrid1D& grid1() const { return grid1_; }
    const PeriodicGrid1D& grid2() const { return grid2_; }
    int index(int k1, int k2) const { return k1 * grid2_.bins() + k2; }

    void add(double z1, double z2, double weight = 1.0);
    double count(int k1, int k2) const { return counts_[index(k1, k2)]; }
    double total() const;
    std::vector<double>& counts() { return counts_; }
    const std::vector<double>& counts() const { return counts_; }

  private:
    PeriodicGrid1D grid1_;
    PeriodicGrid1D grid2_;
    std::vector<double> counts_;
};

// The per-coordinate-group estimator bank: one 1D grid per singleton group
// and at most one 2D grid for the paired group.
class BiasGroupSet {
  public:
    BiasGroupSet() = default;

    int add_singleton(PeriodicGrid1D grid);
    int add_pair(PeriodicGrid1D grid1, PeriodicGrid1D grid2);

    int group_count() const { return static_cast<int>(arity_.size()); }
    int arity(int g) const { return arity_[g]; }

    BiasGrid1D& grid1d(int g);
    const BiasGrid1D& grid1d(int g) const;
    BiasGrid2D& grid2d(int g);
    const BiasGrid2D& grid2d(int g) const;

    void clear_all();

  private:
    std::vector<int> arity_;    // 1 or 2 per group
    std::vector<int> slot_;     // index into the matching storage vector
    std::vector<BiasGrid1D> grids1d_;
    std::vector<BiasGrid2D> grids2d_;
};

}  // namespace tabf
