#include "tabf/abf_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tabf/errors.hpp"

namespace tabf {

namespace {

double ramp_factor(long long count, long long threshold) {
    if (threshold <= 0) return count > 0 ? 1.0 : 0.0;
    if (count >= threshold) return 1.0;
    return static_cast<double>(count) / static_cast<double>(threshold);
}

void check_finite_sample(double sample) {
    if (!std::isfinite(sample)) {
        throw IntegratorError("non-finite force sample deposited; the integrator has blown up");
    }
}

}  // namespace

BiasGrid1D::BiasGrid1D(PeriodicGrid1D grid)
    : grid_(grid), count_(grid.bins(), 0), force_sum_(grid.bins(), 0.0) {}

void BiasGrid1D::deposit(double z, double sample) {
    check_finite_sample(sample);
    const int k = grid_.bin_of(z);
    count_[k] += 1;
    force_sum_[k] += sample;
}

double BiasGrid1D::mean(int bin) const {
    return count_[bin] > 0 ? force_sum_[bin] / static_cast<double>(count_[bin]) : 0.0;
}

long long BiasGrid1D::total_count() const {
    long long t = 0;
    for (long long c : count_) t += c;
    return t;
}

double BiasGrid1D::bias_derivative(double z, long long ramp_threshold) const {
    const int k = grid_.bin_of(z);
    if (count_[k] == 0) return 0.0;
    return ramp_factor(count_[k], ramp_threshold) * (force_sum_[k] / static_cast<double>(count_[k]));
}

double BiasGrid1D::periodicity_residual() const {
    const long long total = total_count();
    if (total == 0) return 0.0;
    double sum = 0.0;
    for (double s : force_sum_) sum += s;
    return sum / static_cast<double>(total);
}

void BiasGrid1D::clear() {
    std::fill(count_.begin(), count_.end(), 0);
    std::fill(force_sum_.begin(), force_sum_.end(), 0.0);
}

void BiasGrid1D::merge(const BiasGrid1D& other) {
    if (!(other.grid_ == grid_)) {
        throw std::invalid_argument("BiasGrid1D::merge: grid shape mismatch");
    }
    for (int k = 0; k < bins(); ++k) {
        count_[k] += other.count_[k];
        force_sum_[k] += other.force_sum_[k];
    }
}

BiasFunction1D BiasGrid1D::integrate_bias() const {
    const int n = bins();
    std::vector<int> empty;
    for (int k = 0; k < n; ++k) {
        if (count_[k] == 0) empty.push_back(k);
    }
    if (!empty.empty()) {
        std::string which;
        for (size_t i = 0; i < empty.size() && i < 8; ++i) {
            which += (i ? "," : "") + std::to_string(empty[i]);
        }
        if (empty.size() > 8) which += ",...";
        throw ConvergenceError("integrate_bias: incomplete sampling, " +
                               std::to_string(empty.size()) + " empty bins (" + which + ")");
    }
    std::vector<double> m(n);
    double mean_of_means = 0.0;
    for (int k = 0; k < n; ++k) {
        m[k] = mean(k);
        mean_of_means += m[k];
    }
    mean_of_means /= n;
    for (double& v : m) v -= mean_of_means;

    std::vector<double> a(n);
    a[0] = 0.0;
    const double w = grid_.width();
    for (int k = 0; k + 1 < n; ++k) {
        a[k + 1] = a[k] + w * 0.5 * (m[k] + m[k + 1]);
    }
    const double lo = *std::min_element(a.begin(), a.end());
    for (double& v : a) v -= lo;
    return BiasFunction1D(grid_, std::move(a));
}

void BiasGrid1D::load(std::vector<long long> counts, std::vector<double> force_sums) {
    if (static_cast<int>(counts.size()) != bins() || static_cast<int>(force_sums.size()) != bins()) {
        throw std::invalid_argument("BiasGrid1D::load: size mismatch");
    }
    count_ = std::move(counts);
    force_sum_ = std::move(force_sums);
}

BiasGrid2D::BiasGrid2D(PeriodicGrid1D grid1, PeriodicGrid1D grid2)
    : grid1_(grid1),
      grid2_(grid2),
      count_(static_cast<size_t>(grid1.bins()) * grid2.bins(), 0),
      force_sum1_(count_.size(), 0.0),
      force_sum2_(count_.size(), 0.0) {}

void BiasGrid2D::deposit(double z1, double z2, double f1, double f2) {
    check_finite_sample(f1);
    check_finite_sample(f2);
    const int k = index(grid1_.bin_of(z1), grid2_.bin_of(z2));
    count_[k] += 1;
    force_sum1_[k] += f1;
    force_sum2_[k] += f2;
}

double BiasGrid2D::mean1(int k1, int k2) const {
    const int k = index(k1, k2);
    return count_[k] > 0 ? force_sum1_[k] / static_cast<double>(count_[k]) : 0.0;
}

double BiasGrid2D::mean2(int k1, int k2) const {
    const int k = index(k1, k2);
    return count_[k] > 0 ? force_sum2_[k] / static_cast<double>(count_[k]) : 0.0;
}

long long BiasGrid2D::total_count() const {
    long long t = 0;
    for (long long c : count_) t += c;
    return t;
}

void BiasGrid2D::bias_force(double z1, double z2, long long ramp_threshold, double& f1,
                            double& f2) const {
    const int k = index(grid1_.bin_of(z1), grid2_.bin_of(z2));
    if (count_[k] == 0) {
        f1 = 0.0;
        f2 = 0.0;
        return;
    }
    const double r = ramp_factor(count_[k], ramp_threshold) / static_cast<double>(count_[k]);
    f1 = r * force_sum1_[k];
    f2 = r * force_sum2_[k];
}

void BiasGrid2D::clear() {
    std::fill(count_.begin(), count_.end(), 0);
    std::fill(force_sum1_.begin(), force_sum1_.end(), 0.0);
    std::fill(force_sum2_.begin(), force_sum2_.end(), 0.0);
}

void BiasGrid2D::merge(const BiasGrid2D& other) {
    if (!(other.grid1_ == grid1_) || !(other.grid2_ == grid2_)) {
        throw std::invalid_argument("BiasGrid2D::merge: grid shape mismatch");
    }
    for (size_t k = 0; k < count_.size(); ++k) {
        count_[k] += other.count_[k];
        force_sum1_[k] += other.force_sum1_[k];
        force_sum2_[k] += other.force_sum2_[k];
    }
}

void BiasGrid2D::load(std::vector<long long> counts, std::vector<double> sums1,
                      std::vector<double> sums2) {
    if (counts.size() != count_.size() || sums1.size() != count_.size() ||
        sums2.size() != count_.size()) {
        throw std::invalid_argument("BiasGrid2D::load: size mismatch");
    }
    count_ = std::move(counts);
    force_sum1_ = std::move(sums1);
    force_sum2_ = std::move(sums2);
}

JointHistogram2D::JointHistogram2D(PeriodicGrid1D grid1, PeriodicGrid1D grid2)
    : grid1_(grid1), grid2_(grid2), counts_(static_cast<size_t>(grid1.bins()) * grid2.bins(), 0.0) {}

void JointHistogram2D::add(double z1, double z2, double weight) {
    counts_[index(grid1_.bin_of(z1), grid2_.bin_of(z2))] += weight;
}

double JointHistogram2D::total() const {
    double t = 0.0;
    for (double c : counts_) t += c;
    return t;
}

int BiasGroupSet::add_singleton(PeriodicGrid1D grid) {
    arity_.push_back(1);
    slot_.push_back(static_cast<int>(grids1d_.size()));
    grids1d_.emplace_back(grid);
    return group_count() - 1;
}

int BiasGroupSet::add_pair(PeriodicGrid1D grid1, PeriodicGrid1D grid2) {
    for (int a : arity_) {
        if (a == 2) {
            throw std::invalid_argument("BiasGroupSet: at most one paired group is supported");
        }
    }
    arity_.push_back(2);
    slot_.push_back(static_cast<int>(grids2d_.size()));
    grids2d_.emplace_back(grid1, grid2);
    return group_count() - 1;
}

BiasGrid1D& BiasGroupSet::grid1d(int g) {
    if (arity_[g] != 1) throw std::invalid_argument("BiasGroupSet: group is not 1D");
    return grids1d_[slot_[g]];
}

const BiasGrid1D& BiasGroupSet::grid1d(int g) const {
    if (arity_[g] != 1) throw std::invalid_argument("BiasGroupSet: group is not 1D");
    return grids1d_[slot_[g]];
}

BiasGrid2D& BiasGroupSet::grid2d(int g) {
    if (arity_[g] != 2) throw std::invalid_argument("BiasGroupSet: group is not 2D");
    return grids2d_[slot_[g]];
}

const BiasGrid2D& BiasGroupSet::grid2d(int g) const {
    if (arity_[g] != 2) throw std::invalid_argument("BiasGroupSet: group is not 2D");
    return grids2d_[slot_[g]];
}

void BiasGroupSet::clear_all() {
    for (auto& g : grids1d_) g.clear();
    for (auto& g : grids2d_) g.clear();
}

}  // namespace tabf
