#include "tabf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tabf/errors.hpp"

namespace tabf {

namespace {

int default_quad_points(int n, int bins) {
    if (n <= 2) return std::max(1024, bins);
    return std::max(192, bins);
}

void require_dimension(const PotentialSpec& spec, int max_n, const char* what) {
    if (spec.dimension() > max_n) {
        throw std::invalid_argument(std::string(what) + ": dimension " +
                                    std::to_string(spec.dimension()) +
                                    " exceeds the supported quadrature limit " +
                                    std::to_string(max_n));
    }
}

// Logarithmic mean, the face weight that ties the entropic flux to exact
// marginal heat dynamics: logmean(a, c) * (ln c - ln a) == c - a.
inline double logmean(double a, double c, double dln) {
    if (std::abs(dln) < 1e-8) return 0.5 * (a + c);
    return (c - a) / dln;
}

}  // namespace

DensityField2D::DensityField2D(int bins1, int bins2, double fill)
    : bins1_(bins1), bins2_(bins2), values_(static_cast<size_t>(bins1) * bins2, fill) {
    if (bins1 < 1 || bins2 < 1) {
        throw std::invalid_argument("DensityField2D: bins must be >= 1");
    }
}

double DensityField2D::quadrature() const {
    double sum = 0.0;
    for (double v : values_) sum += v;
    return sum / static_cast<double>(values_.size());
}

void DensityField2D::normalize() {
    const double z = quadrature();
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw std::invalid_argument("DensityField2D::normalize: integral must be positive");
    }
    for (double& v : values_) v /= z;
}

std::vector<double> DensityField2D::marginal(int axis) const {
    std::vector<double> m;
    if (axis == 0) {
        m.assign(bins1_, 0.0);
        for (int i = 0; i < bins1_; ++i) {
            double s = 0.0;
            for (int j = 0; j < bins2_; ++j) s += at(i, j);
            m[i] = s / bins2_;
        }
    } else if (axis == 1) {
        m.assign(bins2_, 0.0);
        for (int j = 0; j < bins2_; ++j) {
            double s = 0.0;
            for (int i = 0; i < bins1_; ++i) s += at(i, j);
            m[j] = s / bins1_;
        }
    } else {
        throw std::invalid_argument("DensityField2D::marginal: axis must be 0 or 1");
    }
    return m;
}

FreeEnergySurface2D free_energy_2d(const PotentialSpec& spec, double beta, int bins,
                                   int quad_points) {
    require_dimension(spec, 3, "free_energy_2d");
    if (spec.dimension() < 2) {
        throw std::invalid_argument("free_energy_2d: potential must have dimension >= 2");
    }
    PeriodicGrid1D grid(bins);
    FreeEnergySurface2D surface(grid, grid);
    const int n = spec.dimension();
    if (n == 2) {
        std::vector<double> x(2);
        for (int i = 0; i < bins; ++i) {
            x[0] = grid.center(i);
            for (int j = 0; j < bins; ++j) {
                x[1] = grid.center(j);
                surface.set(i, j, spec.evaluate(x));
            }
        }
    } else {
        const int q = quad_points > 0 ? quad_points : default_quad_points(n, bins);
        PeriodicGrid1D qgrid(q);
        std::vector<double> x(3);
        for (int i = 0; i < bins; ++i) {
            x[0] = grid.center(i);
            for (int j = 0; j < bins; ++j) {
                x[1] = grid.center(j);
                double acc = 0.0;
                for (int k = 0; k < q; ++k) {
                    x[2] = qgrid.center(k);
                    acc += std::exp(-beta * spec.evaluate(x));
                }
                surface.set(i, j, -std::log(acc / q) / beta);
            }
        }
    }
    surface.anchor();
    return surface;
}

BiasFunction1D free_energy_1d(const PotentialSpec& spec, int axis, double beta, int bins,
                              int quad_points) {
    require_dimension(spec, 3, "free_energy_1d");
    const int n = spec.dimension();
    if (axis < 0 || axis >= n) throw std::invalid_argument("free_energy_1d: axis out of range");
    PeriodicGrid1D grid(bins);
    const int q = quad_points > 0 ? quad_points : default_quad_points(n, bins);
    PeriodicGrid1D qgrid(q);
    std::vector<double> values(bins);
    std::vector<double> x(n);
    std::vector<int> other;
    for (int i = 0; i < n; ++i) {
        if (i != axis) other.push_back(i);
    }
    for (int k = 0; k < bins; ++k) {
        x[axis] = grid.center(k);
        double acc = 0.0;
        if (other.size() == 1) {
            for (int a = 0; a < q; ++a) {
                x[other[0]] = qgrid.center(a);
                acc += std::exp(-beta * spec.evaluate(x));
            }
            acc /= q;
        } else {
            for (int a = 0; a < q; ++a) {
                x[other[0]] = qgrid.center(a);
                for (int b = 0; b < q; ++b) {
                    x[other[1]] = qgrid.center(b);
                    acc += std::exp(-beta * spec.evaluate(x));
                }
            }
            acc /= static_cast<double>(q) * q;
        }
        values[k] = -std::log(acc) / beta;
    }
    const double lo = *std::min_element(values.begin(), values.end());
    for (double& v : values) v -= lo;
    return BiasFunction1D(grid, std::move(values));
}

BiasFunction1D mean_force_1d(const PotentialSpec& spec, int axis, double beta, int bins,
                             int quad_points) {
    require_dimension(spec, 3, "mean_force_1d");
    const int n = spec.dimension();
    if (axis < 0 || axis >= n) throw std::invalid_argument("mean_force_1d: axis out of range");
    PeriodicGrid1D grid(bins);
    const int q = quad_points > 0 ? quad_points : default_quad_points(n, bins);
    PeriodicGrid1D qgrid(q);
    std::vector<double> values(bins);
    std::vector<double> x(n);
    std::vector<int> other;
    for (int i = 0; i < n; ++i) {
        if (i != axis) other.push_back(i);
    }
    for (int k = 0; k < bins; ++k) {
        x[axis] = grid.center(k);
        double num = 0.0, den = 0.0;
        auto tally = [&] {
            const double w = std::exp(-beta * spec.evaluate(x));
            num += spec.partial(x, axis) * w;
            den += w;
        };
        if (other.empty()) {
            tally();
        } else if (other.size() == 1) {
            for (int a = 0; a < q; ++a) {
                x[other[0]] = qgrid.center(a);
                tally();
            }
        } else {
            for (int a = 0; a < q; ++a) {
                x[other[0]] = qgrid.center(a);
                for (int b = 0; b < q; ++b) {
                    x[other[1]] = qgrid.center(b);
                    tally();
                }
            }
        }
        values[k] = num / den;
    }
    return BiasFunction1D(grid, std::move(values));
}

double canonical_average(const PotentialSpec& spec,
                         const std::function<double(std::span<const double>)>& observable,
                         double beta, int quad_points) {
    require_dimension(spec, 3, "canonical_average");
    const int n = spec.dimension();
    const int q = quad_points > 0 ? quad_points : default_quad_points(n, 0);
    PeriodicGrid1D qgrid(q);
    std::vector<double> x(n);
    std::vector<int> idx(n, 0);
    double num = 0.0, den = 0.0;
    while (true) {
        for (int i = 0; i < n; ++i) x[i] = qgrid.center(idx[i]);
        const double w = std::exp(-beta * spec.evaluate(x));
        num += observable(x) * w;
        den += w;
        int d = n - 1;
        while (d >= 0 && ++idx[d] == q) {
            idx[d] = 0;
            --d;
        }
        if (d < 0) break;
    }
    return num / den;
}

DensityField2D StationaryPair::stationary_density(const FreeEnergySurface2D& surface) const {
    if (surface.bins1() != bins || surface.bins2() != bins) {
        throw std::invalid_argument("stationary_density: surface grid mismatch");
    }
    DensityField2D psi(bins, bins);
    for (int i = 0; i < bins; ++i) {
        for (int j = 0; j < bins; ++j) {
            psi.at(i, j) = std::exp(-beta * surface.value(i, j)) / (rho1[i] * rho2[j]);
        }
    }
    psi.normalize();
    return psi;
}

StationaryPair solve_stationary_pair(const FreeEnergySurface2D& surface, double beta, double tol,
                                     int max_iter) {
    if (surface.bins1() != surface.bins2()) {
        throw std::invalid_argument("solve_stationary_pair: surface grid must be square");
    }
    if (tol <= 0.0) throw std::invalid_argument("solve_stationary_pair: tol must be > 0");
    const int bins = surface.bins1();
    if (surface.visited_count() != bins * bins) {
        throw std::invalid_argument("solve_stationary_pair: surface must be fully visited");
    }
    const double h = 1.0 / bins;

    std::vector<double> big_b(static_cast<size_t>(bins) * bins);
    double b_min = std::numeric_limits<double>::infinity();
    double b_max = 0.0;
    for (int i = 0; i < bins; ++i) {
        for (int j = 0; j < bins; ++j) {
            const double v = std::exp(-beta * surface.value(i, j));
            big_b[i * bins + j] = v;
            b_min = std::min(b_min, v);
            b_max = std::max(b_max, v);
        }
    }
    const double lower = (b_min / b_max) * (b_min / b_max);
    const double upper = (b_max / b_min) * (b_max / b_min);

    StationaryPair pair;
    pair.bins = bins;
    pair.beta = beta;
    pair.rho1.assign(bins, 1.0);
    pair.rho2.assign(bins, 0.0);
    std::vector<double> denom(bins), next(bins);

    int it = 0;
    double change = std::numeric_limits<double>::infinity();
    for (; it < max_iter && change >= tol; ++it) {
        // denom[j] = h sum_i B(i,j)/rho1(i), the rho2 candidate.
        for (int j = 0; j < bins; ++j) {
            double s = 0.0;
            for (int i = 0; i < bins; ++i) s += big_b[i * bins + j] / pair.rho1[i];
            denom[j] = h * s;
        }
        for (int i = 0; i < bins; ++i) {
            double s = 0.0;
            for (int j = 0; j < bins; ++j) s += big_b[i * bins + j] / denom[j];
            next[i] = h * s;
        }
        double z = 0.0;
        for (int i = 0; i < bins; ++i) z += 1.0 / next[i];
        z *= h;
        change = 0.0;
        for (int i = 0; i < bins; ++i) {
            next[i] *= z;
            change = std::max(change, std::abs(next[i] - pair.rho1[i]));
            if (next[i] < lower - 1e-12 || next[i] > upper + 1e-12) {
                throw std::runtime_error(
                    "solve_stationary_pair: iterate escaped the a^2/b^2..b^2/a^2 bounds");
            }
        }
        pair.rho1.swap(next);
    }
    if (change >= tol) {
        throw ConvergenceError("solve_stationary_pair: no convergence after " +
                               std::to_string(max_iter) + " iterations (last change " +
                               std::to_string(change) + ")");
    }
    pair.iterations = it;

    for (int j = 0; j < bins; ++j) {
        double s = 0.0;
        for (int i = 0; i < bins; ++i) s += big_b[i * bins + j] / pair.rho1[i];
        pair.rho2[j] = h * s;
    }
    // Residual of the first fixed-point equation (the second holds by
    // construction of rho2).
    double residual = 0.0;
    for (int i = 0; i < bins; ++i) {
        double s = 0.0;
        for (int j = 0; j < bins; ++j) s += big_b[i * bins + j] / pair.rho2[j];
        residual = std::max(residual, std::abs(pair.rho1[i] - h * s));
    }
    pair.residual = residual;

    pair.a_inf1.resize(bins);
    pair.a_inf2.resize(bins);
    for (int i = 0; i < bins; ++i) {
        pair.a_inf1[i] = -std::log(pair.rho1[i]) / beta;
        pair.a_inf2[i] = -std::log(pair.rho2[i]) / beta;
    }
    return pair;
}

StationaryPair solve_stationary_pair(const PotentialSpec& spec, double beta, int bins, double tol,
                                     int max_iter) {
    return solve_stationary_pair(free_energy_2d(spec, beta, bins), beta, tol, max_iter);
}

double fp_stable_dt(const PotentialSpec& spec, int bins, double beta) {
    const double h = 1.0 / bins;
    const double diffusion = beta * h * h / 4.0;
    const double drift_scale = 2.0 * std::max(spec.gradient_bound(), 1e-30);
    const double advection = h / drift_scale;
    return std::min(diffusion, advection);
}

FpResult evolve_fokker_planck(const PotentialSpec& spec, const FpOptions& options,
                              const DensityField2D& initial,
                              const std::function<void(const FpSnapshot&)>& observer) {
    if (spec.dimension() != 2) {
        throw std::invalid_argument("evolve_fokker_planck: potential must live on T^2");
    }
    const int b = options.bins;
    if (initial.bins1() != b || initial.bins2() != b) {
        throw std::invalid_argument("evolve_fokker_planck: initial density grid mismatch");
    }
    if (std::abs(initial.quadrature() - 1.0) > 1e-9) {
        throw std::invalid_argument("evolve_fokker_planck: initial density must be normalized");
    }
    if (!options.adaptive) {
        if (!options.frozen_bias1.empty() && static_cast<int>(options.frozen_bias1.size()) != b) {
            throw std::invalid_argument("evolve_fokker_planck: frozen_bias1 size mismatch");
        }
        if (!options.frozen_bias2.empty() && static_cast<int>(options.frozen_bias2.size()) != b) {
            throw std::invalid_argument("evolve_fokker_planck: frozen_bias2 size mismatch");
        }
    }
    const double beta = options.beta;
    const double h = 1.0 / b;
    const double inv_beta = 1.0 / beta;
    const double stable = fp_stable_dt(spec, b, beta);
    const double dt = options.dt > 0.0 ? options.dt : 0.6 * stable;
    if (dt > stable) {
        throw std::invalid_argument("evolve_fokker_planck: dt " + std::to_string(dt) +
                                    " exceeds the stability bound " + std::to_string(stable));
    }
    const long long steps = static_cast<long long>(std::ceil(options.t_final / dt - 1e-9));

    const size_t cells = static_cast<size_t>(b) * b;
    PeriodicGrid1D grid(b);
    std::vector<double> v(cells), dv1(cells), dv2(cells);
    {
        std::vector<double> x(2);
        for (int i = 0; i < b; ++i) {
            x[0] = grid.center(i);
            for (int j = 0; j < b; ++j) {
                x[1] = grid.center(j);
                v[i * b + j] = spec.evaluate(x);
            }
        }
        for (int i = 0; i < b; ++i) {
            for (int j = 0; j < b; ++j) {
                dv1[i * b + j] = v[((i + 1) % b) * b + j] - v[i * b + j];
                dv2[i * b + j] = v[i * b + (j + 1) % b] - v[i * b + j];
            }
        }
    }
    std::vector<double> frozen_p1(b, 0.0), frozen_p2(b, 0.0);
    if (!options.adaptive) {
        if (!options.frozen_bias1.empty()) {
            for (int i = 0; i < b; ++i) {
                frozen_p1[i] = (options.frozen_bias1[(i + 1) % b] - options.frozen_bias1[i]) / h;
            }
        }
        if (!options.frozen_bias2.empty()) {
            for (int j = 0; j < b; ++j) {
                frozen_p2[j] = (options.frozen_bias2[(j + 1) % b] - options.frozen_bias2[j]) / h;
            }
        }
    }

    DensityField2D psi = initial;
    std::vector<double> ln_psi(cells), wbar1(cells), wbar2(cells), dln1(cells), dln2(cells);
    std::vector<double> p1(b), p2(b), flux1(cells), flux2(cells);

    auto face_pass = [&] {
        auto vals = psi.values();
        for (size_t k = 0; k < cells; ++k) {
            if (!(vals[k] > 0.0)) {
                throw IntegratorError(
                    "evolve_fokker_planck: density lost positivity; reduce dt (stability bound " +
                    std::to_string(stable) + ")");
            }
            ln_psi[k] = std::log(vals[k]);
        }
        for (int i = 0; i < b; ++i) {
            const int ip = (i + 1) % b;
            double wsum = 0.0, fsum = 0.0;
            for (int j = 0; j < b; ++j) {
                const size_t k = static_cast<size_t>(i) * b + j;
                const size_t kp = static_cast<size_t>(ip) * b + j;
                const double dln = ln_psi[kp] - ln_psi[k];
                const double w = logmean(vals[k], vals[kp], dln);
                dln1[k] = dln;
                wbar1[k] = w;
                wsum += w;
                fsum += w * dv1[k];
            }
            p1[i] = options.adaptive ? fsum / (h * wsum) : frozen_p1[i];
        }
        for (int j = 0; j < b; ++j) {
            const int jp = (j + 1) % b;
            double wsum = 0.0, fsum = 0.0;
            for (int i = 0; i < b; ++i) {
                const size_t k = static_cast<size_t>(i) * b + j;
                const size_t kp = static_cast<size_t>(i) * b + jp;
                const double dln = ln_psi[kp] - ln_psi[k];
                const double w = logmean(vals[k], vals[kp], dln);
                dln2[k] = dln;
                wbar2[k] = w;
                wsum += w;
                fsum += w * dv2[k];
            }
            p2[j] = options.adaptive ? fsum / (h * wsum) : frozen_p2[j];
        }
    };

    FpResult result;
    result.dt = dt;
    result.stable_dt = stable;
    result.steps = steps;

    auto make_snapshot = [&](double t, long long step) {
        FpSnapshot snap;
        snap.time = t;
        snap.step = step;
        snap.psi = psi;
        snap.bias_prime1 = p1;
        snap.bias_prime2 = p2;
        return snap;
    };
    auto emit = [&](double t, long long step) {
        if (!observer && !options.keep_snapshots) return;
        FpSnapshot snap = make_snapshot(t, step);
        if (observer) observer(snap);
        if (options.keep_snapshots) result.snapshots.push_back(std::move(snap));
    };

    face_pass();
    emit(0.0, 0);

    for (long long step = 1; step <= steps; ++step) {
        for (size_t k = 0; k < cells; ++k) {
            const int i = static_cast<int>(k) / b;
            flux1[k] = wbar1[k] * (inv_beta * dln1[k] + dv1[k] - h * p1[i]) / h;
        }
        for (size_t k = 0; k < cells; ++k) {
            const int j = static_cast<int>(k) % b;
            flux2[k] = wbar2[k] * (inv_beta * dln2[k] + dv2[k] - h * p2[j]) / h;
        }
        auto vals = psi.values();
        for (int i = 0; i < b; ++i) {
            const int im = (i + b - 1) % b;
            for (int j = 0; j < b; ++j) {
                const int jm = (j + b - 1) % b;
                const size_t k = static_cast<size_t>(i) * b + j;
                vals[k] -= dt / h *
                           (flux1[k] - flux1[static_cast<size_t>(im) * b + j] + flux2[k] -
                            flux2[static_cast<size_t>(i) * b + jm]);
            }
        }
        face_pass();
        if (options.snapshot_every > 0 && (step % options.snapshot_every == 0) && step != steps) {
            emit(step * dt, step);
        }
        if (step == steps) {
            result.final_state = make_snapshot(step * dt, step);
            if (observer) observer(result.final_state);
            if (options.keep_snapshots) result.snapshots.push_back(result.final_state);
        }
    }
    if (steps == 0) result.final_state = make_snapshot(0.0, 0);
    return result;
}

}  // namespace tabf
