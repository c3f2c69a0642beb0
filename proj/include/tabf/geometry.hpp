#pragma once

#include <span>
#include <vector>

namespace tabf {

// Wrap a coordinate to the unit torus [0, 1). Throws on non-finite input.
double wrap(double z);

// Minimal signed representative of a - b on the torus, in [-0.5, 0.5).
double periodic_delta(double a, double b);

// Periodic midpoint rule on the flat unit torus. The grid may be the
// flattening of a uniform grid in any dimension: the torus has unit
// volume, so the integral is the mean of the samples. Exact for
// trigonometric polynomials below the grid Nyquist order.
double periodic_quadrature(std::span<const double> values);

// A point on T^n with every component kept in [0, 1).
class TorusPoint {
  public:
    explicit TorusPoint(std::vector<double> coords);
    TorusPoint(std::initializer_list<double> coords);

    int dimension() const { return static_cast<int>(coords_.size()); }
    double operator[](int i) const { return coords_[i]; }
    std::span<const double> coords() const { return coords_; }

  private:
    std::vector<double> coords_;
};

// Uniform binning of T into `bins` cells of width 1/bins, bin centers at
// (k + 0.5) / bins.
class PeriodicGrid1D {
  public:
    explicit PeriodicGrid1D(int bins);

    int bins() const { return bins_; }
    double width() const { return 1.0 / bins_; }
    int bin_of(double z) const;
    double center(int k) const { return (k + 0.5) / bins_; }

    bool operator==(const PeriodicGrid1D&) const = default;

  private:
    int bins_;
};

}  // namespace tabf
